#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ebamr/amr.hpp"

namespace ebamr {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string key, const std::string& what)
      : std::runtime_error(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

enum class ProblemType { rotated_channel_shock, rotated_sod, shock_cylinder, custom };
enum class Shape { channel, cylinder, none };
enum class InitKind { lab_x_split, rotated_split, shock };
enum class RefineMode { static_boxes, dynamic };

/// Physical rectangle [x0, x1] x [y0, y1].
struct RealBox {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
};

struct RunConfig {
  ProblemType problem = ProblemType::custom;

  // [domain]
  double xlo = 0.0, xhi = 1.0, ylo = 0.0, yhi = 1.0;
  int nx = 64, ny = 64;

  // [geometry]
  Shape shape = Shape::none;
  double angle_deg = 0.0;
  double half_width = 0.25;
  double center_x = 0.0, center_y = 0.0;
  double radius = 0.25;

  // [initial]
  InitKind init = InitKind::lab_x_split;
  double position = 0.0;
  Prim left{1.0, 0.0, 0.0, 1.0};
  Prim right{1.0, 0.0, 0.0, 1.0};
  double mach = 0.0;

  // [amr]
  int levels = 1;
  RefineMode mode = RefineMode::static_boxes;
  std::vector<RealBox> boxes;  // boxes[l-1] covers level l in static mode
  double threshold = 0.0;
  int interval = 1;
  int buffer = 2;

  // [solver]
  Integrator integrator = Integrator::godunov;
  Redistribution redist = Redistribution::wsrd_normal;
  bool refluxing = true;
  bool rerd = true;
  double cfl = 0.5;
  double gamma = 1.4;
  bool gradients = true;
  bool limiter = true;
  int threads = 1;

  // [time]
  double t_end = 0.1;
  int max_steps = 100000;

  // [bc]
  DomainBc bc{};

  // [output]
  std::vector<double> plot_times;
  int plot_interval = 0;
  bool ledger = true;
  bool profile = false;
  double profile_s0 = -0.5, profile_s1 = 0.5, profile_ds = 0.0;  // ds 0: finest cell size
  bool register_dump = false;
};

/// Defaults of a problem type, before any key of the file is applied.
RunConfig problem_defaults(ProblemType p);

/// key = value lines grouped under [section] headers; '#' starts a comment. problem.type selects
/// the defaults, the remaining keys override them. Unknown keys are errors.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Throws ValidationError naming the offending key.
void validate_config(const RunConfig& c);

/// Full listing of every key, parseable by parse_config.
std::string serialize_config(const RunConfig& c);

const char* to_string(ProblemType p);
const char* to_string(Integrator i);
const char* to_string(Redistribution r);

AmrOptions amr_options(const RunConfig& c);
ImplicitFunction implicit_function(const RunConfig& c);
/// Initial primitive state at a point.
Prim initial_state(const RunConfig& c, Point x);
/// Post-shock state for a shock of Mach number m running into `ahead` (at rest) in +x.
Prim post_shock_state(const Prim& ahead, double m, const Gas& gas);
/// Cell box of level l covering a physical rectangle, aligned to level l - 1.
Box level_box(const RunConfig& c, int l, const RealBox& r);

}  // namespace ebamr
