#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>

#include "ebamr/config.hpp"
#include "ebamr/diagnostics.hpp"

namespace ebamr {

/// Hierarchy with the configured levels set up and initialized at t = 0.
std::unique_ptr<Hierarchy> build_hierarchy(const RunConfig& c);

/// Tag-and-regrid every level that can have a finer one, coarsest first.
void regrid_all(Hierarchy& h, const RunConfig& c);

struct RunResult {
  ConservationLedger ledger{true, true};
  std::vector<ProfileSample> profile;
  int steps = 0;
  double time = 0.0;
  std::vector<std::filesystem::path> plotfiles;
  std::shared_ptr<Hierarchy> hierarchy;  // final state
};

/// Centerline of the configured geometry: through the channel axis (or the domain's mid
/// height) and centered on the initial discontinuity.
struct Line {
  Point center;
  double theta = 0.0;
};
Line profile_line(const RunConfig& c);

/// Profile at the current time, with the exact Riemann solution when the initial data is a
/// one-dimensional split.
std::vector<ProfileSample> sample_profile(const Hierarchy& h, const RunConfig& c);

/// Advance to t_end. With a non-empty `outdir`, writes plotfiles, ledger.csv, profile.csv and
/// optional register dumps there. Solver failures propagate (tagged with the step) after the
/// partial ledger has been written.
RunResult run(const RunConfig& c, const std::filesystem::path& outdir = {}, std::ostream* log = nullptr);

/// Plotfile directory: level_<l>.csv, schlieren.csv and manifest.json.
std::filesystem::path write_plotfile(const Hierarchy& h, int step, const std::filesystem::path& outdir);

}  // namespace ebamr
