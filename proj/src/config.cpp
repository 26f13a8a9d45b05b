#include "ebamr/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace ebamr {

namespace {

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

// Values are parsed from strings; failures carry the key and are turned into ParseErrors
// with the line number by the caller.
struct BadValue {
  std::string msg;
};

double to_double(const std::string& v) {
  double x = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw BadValue{"not a number: '" + v + "'"};
  return x;
}

int to_int(const std::string& v) {
  int x = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw BadValue{"not an integer: '" + v + "'"};
  return x;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw BadValue{"not a boolean: '" + v + "'"};
}

template <typename E>
E to_enum(const std::string& v, const std::vector<std::pair<const char*, E>>& names) {
  for (const auto& [n, e] : names) {
    if (v == n) return e;
  }
  std::string opts;
  for (const auto& [n, e] : names) opts += std::string(opts.empty() ? "" : ", ") + n;
  throw BadValue{"unknown value '" + v + "' (expected " + opts + ")"};
}

template <typename E>
const char* enum_name(E e, const std::vector<std::pair<const char*, E>>& names) {
  for (const auto& [n, x] : names) {
    if (x == e) return n;
  }
  return "?";
}

const std::vector<std::pair<const char*, ProblemType>> kProblems{{"rotated_channel_shock", ProblemType::rotated_channel_shock},
                                                                 {"rotated_sod", ProblemType::rotated_sod},
                                                                 {"shock_cylinder", ProblemType::shock_cylinder},
                                                                 {"custom", ProblemType::custom}};
const std::vector<std::pair<const char*, Shape>> kShapes{
    {"channel", Shape::channel}, {"cylinder", Shape::cylinder}, {"none", Shape::none}};
const std::vector<std::pair<const char*, InitKind>> kInits{
    {"lab_x_split", InitKind::lab_x_split}, {"rotated_split", InitKind::rotated_split}, {"shock", InitKind::shock}};
const std::vector<std::pair<const char*, RefineMode>> kModes{{"static", RefineMode::static_boxes},
                                                             {"dynamic", RefineMode::dynamic}};
const std::vector<std::pair<const char*, Integrator>> kIntegrators{{"godunov", Integrator::godunov},
                                                                   {"mol", Integrator::mol}};
const std::vector<std::pair<const char*, Redistribution>> kRedists{{"wsrd_normal", Redistribution::wsrd_normal},
                                                                   {"wsrd_central", Redistribution::wsrd_central},
                                                                   {"frd", Redistribution::frd}};
const std::vector<std::pair<const char*, BcType>> kBcs{
    {"wall", BcType::wall}, {"outflow", BcType::outflow}, {"periodic", BcType::periodic}};

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : " ") + fmt(x);
  return s;
}

RealBox to_box(const std::string& v) {
  const auto w = words(v);
  if (w.size() != 4) throw BadValue{"a box needs four numbers: x0 y0 x1 y1"};
  return {to_double(w[0]), to_double(w[1]), to_double(w[2]), to_double(w[3])};
}

std::string box_str(const RealBox& b) { return fmt(b.x0) + " " + fmt(b.y0) + " " + fmt(b.x1) + " " + fmt(b.y1); }

struct Key {
  std::string name;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

Key dbl(std::string n, double RunConfig::*m) {
  return {n, [m](RunConfig& c, const std::string& v) { c.*m = to_double(v); },
          [m](const RunConfig& c) { return fmt(c.*m); }};
}
Key integer(std::string n, int RunConfig::*m) {
  return {n, [m](RunConfig& c, const std::string& v) { c.*m = to_int(v); },
          [m](const RunConfig& c) { return std::to_string(c.*m); }};
}
Key boolean(std::string n, bool RunConfig::*m) {
  return {n, [m](RunConfig& c, const std::string& v) { c.*m = to_bool(v); },
          [m](const RunConfig& c) { return std::string(c.*m ? "true" : "false"); }};
}
template <typename E>
Key enumeration(std::string n, E RunConfig::*m, const std::vector<std::pair<const char*, E>>& names) {
  return {n, [m, &names](RunConfig& c, const std::string& v) { c.*m = to_enum(v, names); },
          [m, &names](const RunConfig& c) { return std::string(enum_name(c.*m, names)); }};
}
Key prim(std::string n, Prim RunConfig::*s, double Prim::*f) {
  return {n, [s, f](RunConfig& c, const std::string& v) { (c.*s).*f = to_double(v); },
          [s, f](const RunConfig& c) { return fmt((c.*s).*f); }};
}
Key bc_side(std::string n, int side) {
  return {n, [side](RunConfig& c, const std::string& v) { c.bc.side[side] = to_enum(v, kBcs); },
          [side](const RunConfig& c) { return std::string(enum_name(c.bc.side[side], kBcs)); }};
}
Key level_box_key(std::string n, int l) {
  return {n,
          [l](RunConfig& c, const std::string& v) {
            if (static_cast<int>(c.boxes.size()) < l) c.boxes.resize(l);
            c.boxes[l - 1] = to_box(v);
          },
          [l](const RunConfig& c) {
            return static_cast<int>(c.boxes.size()) >= l ? box_str(c.boxes[l - 1]) : std::string();
          }};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> k{
      enumeration("problem.type", &RunConfig::problem, kProblems),
      dbl("domain.xlo", &RunConfig::xlo),
      dbl("domain.xhi", &RunConfig::xhi),
      dbl("domain.ylo", &RunConfig::ylo),
      dbl("domain.yhi", &RunConfig::yhi),
      integer("domain.nx", &RunConfig::nx),
      integer("domain.ny", &RunConfig::ny),
      enumeration("geometry.shape", &RunConfig::shape, kShapes),
      dbl("geometry.angle_deg", &RunConfig::angle_deg),
      dbl("geometry.half_width", &RunConfig::half_width),
      dbl("geometry.center_x", &RunConfig::center_x),
      dbl("geometry.center_y", &RunConfig::center_y),
      dbl("geometry.radius", &RunConfig::radius),
      enumeration("initial.kind", &RunConfig::init, kInits),
      dbl("initial.position", &RunConfig::position),
      prim("initial.left_rho", &RunConfig::left, &Prim::rho),
      prim("initial.left_u", &RunConfig::left, &Prim::u),
      prim("initial.left_v", &RunConfig::left, &Prim::v),
      prim("initial.left_p", &RunConfig::left, &Prim::p),
      prim("initial.right_rho", &RunConfig::right, &Prim::rho),
      prim("initial.right_u", &RunConfig::right, &Prim::u),
      prim("initial.right_v", &RunConfig::right, &Prim::v),
      prim("initial.right_p", &RunConfig::right, &Prim::p),
      dbl("initial.mach", &RunConfig::mach),
      integer("amr.levels", &RunConfig::levels),
      enumeration("amr.mode", &RunConfig::mode, kModes),
      level_box_key("amr.box1", 1),
      level_box_key("amr.box2", 2),
      dbl("amr.threshold", &RunConfig::threshold),
      integer("amr.interval", &RunConfig::interval),
      integer("amr.buffer", &RunConfig::buffer),
      enumeration("solver.integrator", &RunConfig::integrator, kIntegrators),
      enumeration("solver.redistribution", &RunConfig::redist, kRedists),
      boolean("solver.refluxing", &RunConfig::refluxing),
      boolean("solver.rerd", &RunConfig::rerd),
      dbl("solver.cfl", &RunConfig::cfl),
      dbl("solver.gamma", &RunConfig::gamma),
      boolean("solver.gradients", &RunConfig::gradients),
      boolean("solver.limiter", &RunConfig::limiter),
      integer("solver.threads", &RunConfig::threads),
      dbl("time.t_end", &RunConfig::t_end),
      integer("time.max_steps", &RunConfig::max_steps),
      bc_side("bc.xlo", 0),
      bc_side("bc.xhi", 1),
      bc_side("bc.ylo", 2),
      bc_side("bc.yhi", 3),
      {"output.plot_times",
       [](RunConfig& c, const std::string& v) {
         c.plot_times.clear();
         for (const auto& w : words(v)) c.plot_times.push_back(to_double(w));
       },
       [](const RunConfig& c) { return fmt_list(c.plot_times); }},
      integer("output.plot_interval", &RunConfig::plot_interval),
      boolean("output.ledger", &RunConfig::ledger),
      boolean("output.profile", &RunConfig::profile),
      dbl("output.profile_s0", &RunConfig::profile_s0),
      dbl("output.profile_s1", &RunConfig::profile_s1),
      dbl("output.profile_ds", &RunConfig::profile_ds),
      boolean("output.register_dump", &RunConfig::register_dump),
  };
  return k;
}

const Key* find_key(const std::string& name) {
  for (const auto& k : keys()) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

}  // namespace

const char* to_string(ProblemType p) { return enum_name(p, kProblems); }
const char* to_string(Integrator i) { return enum_name(i, kIntegrators); }
const char* to_string(Redistribution r) { return enum_name(r, kRedists); }

RunConfig problem_defaults(ProblemType p) {
  RunConfig c;
  c.problem = p;
  switch (p) {
    case ProblemType::rotated_channel_shock:
      c.xlo = c.ylo = -2.0;
      c.xhi = c.yhi = 2.0;
      c.nx = c.ny = 64;
      c.shape = Shape::channel;
      c.angle_deg = 30.0;
      c.half_width = 0.172;
      c.init = InitKind::lab_x_split;
      c.left = {0.125, 0.0, 0.0, 0.1};
      c.right = {1.0, 0.0, 0.0, 1.0};
      c.levels = 2;
      c.boxes = {{-2.0, -0.125, 2.0, 0.125}};
      c.t_end = 0.4;
      break;
    case ProblemType::rotated_sod:
      c.xlo = c.ylo = -1.0;
      c.xhi = c.yhi = 1.0;
      c.nx = c.ny = 160;
      c.shape = Shape::channel;
      c.angle_deg = 30.0;
      c.half_width = 0.172;
      c.init = InitKind::rotated_split;
      c.left = {1.0, 0.0, 0.0, 1.0};
      c.right = {0.125, 0.0, 0.0, 0.1};
      c.levels = 2;
      c.mode = RefineMode::dynamic;
      c.threshold = 0.05;
      c.integrator = Integrator::mol;
      c.t_end = 0.1;
      c.bc.side = {BcType::outflow, BcType::outflow, BcType::outflow, BcType::outflow};
      c.profile = true;
      break;
    case ProblemType::shock_cylinder:
      c.nx = c.ny = 256;
      c.shape = Shape::cylinder;
      c.center_x = c.center_y = 0.5;
      c.radius = 0.15;
      c.init = InitKind::shock;
      c.position = 0.2;
      c.mach = 2.81;
      c.right = {1.0, 0.0, 0.0, 1.0 / (c.gamma - 1.0)};
      c.levels = 3;
      c.boxes = {{0.3, 0.5, 0.7, 0.72}, {0.32, 0.52, 0.68, 0.7}};
      c.t_end = 0.088;
      c.plot_times = {0.068, 0.088};
      c.bc.side = {BcType::outflow, BcType::outflow, BcType::wall, BcType::wall};
      break;
    case ProblemType::custom:
      break;
  }
  return c;
}

RunConfig parse_config(const std::string& text) {
  struct Entry {
    std::string value;
    int line;
  };
  std::vector<std::pair<std::string, Entry>> entries;
  std::map<std::string, int> seen;
  std::string section;
  std::istringstream is(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) throw ParseError(lineno, "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(lineno, "expected key = value");
    const std::string k = trim(line.substr(0, eq));
    if (k.empty()) throw ParseError(lineno, "missing key");
    if (section.empty()) throw ParseError(lineno, "key '" + k + "' outside of a section");
    const std::string full = section + "." + k;
    if (!find_key(full)) throw ParseError(lineno, "unknown key '" + full + "'");
    if (seen.count(full)) throw ParseError(lineno, "duplicate key '" + full + "'");
    seen[full] = lineno;
    entries.push_back({full, {trim(line.substr(eq + 1)), lineno}});
  }
  RunConfig c;
  const auto pt = std::find_if(entries.begin(), entries.end(), [](const auto& e) { return e.first == "problem.type"; });
  if (pt == entries.end() || pt->second.value.empty()) throw ValidationError("problem.type", "must be set");
  try {
    c = problem_defaults(to_enum(pt->second.value, kProblems));
  } catch (const BadValue& b) {
    throw ParseError(pt->second.line, "problem.type: " + b.msg);
  }
  for (const auto& [k, e] : entries) {
    if (k == "problem.type") continue;
    try {
      find_key(k)->set(c, e.value);
    } catch (const BadValue& b) {
      throw ParseError(e.line, k + ": " + b.msg);
    }
  }
  validate_config(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

void validate_config(const RunConfig& c) {
  auto req = [](bool ok, const char* key, const std::string& what) {
    if (!ok) throw ValidationError(key, what);
  };
  req(c.xhi > c.xlo, "domain.xhi", "must exceed domain.xlo");
  req(c.yhi > c.ylo, "domain.yhi", "must exceed domain.ylo");
  req(c.nx >= 8, "domain.nx", "must be at least 8");
  req(c.ny >= 8, "domain.ny", "must be at least 8");
  req(c.nx % 2 == 0, "domain.nx", "must be even");
  req(c.ny % 2 == 0, "domain.ny", "must be even");
  const double dx = (c.xhi - c.xlo) / c.nx, dy = (c.yhi - c.ylo) / c.ny;
  req(std::abs(dx - dy) <= 1e-12 * dx, "domain.ny", "cells must be square");
  req(c.half_width > 0.0, "geometry.half_width", "must be positive");
  req(c.radius > 0.0, "geometry.radius", "must be positive");
  req(c.left.rho > 0.0, "initial.left_rho", "must be positive");
  req(c.left.p > 0.0, "initial.left_p", "must be positive");
  req(c.right.rho > 0.0, "initial.right_rho", "must be positive");
  req(c.right.p > 0.0, "initial.right_p", "must be positive");
  req(c.init != InitKind::shock || c.mach > 1.0, "initial.mach", "a shock needs a Mach number above 1");
  req(c.levels >= 1 && c.levels <= 3, "amr.levels", "must be 1, 2 or 3");
  if (c.mode == RefineMode::static_boxes) {
    req(static_cast<int>(c.boxes.size()) >= c.levels - 1, c.levels == 3 && c.boxes.size() == 1 ? "amr.box2" : "amr.box1",
        "static refinement needs a box for every refined level");
    for (int l = 0; l + 1 < c.levels; ++l) {
      const RealBox& b = c.boxes[l];
      req(b.x1 > b.x0 && b.y1 > b.y0, l == 0 ? "amr.box1" : "amr.box2", "empty box");
    }
  } else {
    req(c.threshold > 0.0, "amr.threshold", "dynamic refinement needs a positive tagging threshold");
    req(c.interval >= 1, "amr.interval", "must be at least 1");
  }
  req(c.buffer >= 0, "amr.buffer", "must be non-negative");
  req(c.cfl > 0.0, "solver.cfl", "must be positive");
  req(c.cfl <= 1.0, "solver.cfl", "must not exceed 1");
  req(c.gamma > 1.0, "solver.gamma", "must exceed 1");
  req(!c.rerd || c.refluxing, "solver.rerd", "re-redistribution requires refluxing");
  req(c.threads >= 1, "solver.threads", "must be at least 1");
  req(c.t_end > 0.0, "time.t_end", "must be positive");
  req(c.max_steps >= 1, "time.max_steps", "must be at least 1");
  for (int d = 0; d < 2; ++d) {
    req((c.bc.side[2 * d] == BcType::periodic) == (c.bc.side[2 * d + 1] == BcType::periodic),
        d == 0 ? "bc.xhi" : "bc.yhi", "periodic must be set on both sides");
  }
  for (double t : c.plot_times) req(t >= 0.0 && t <= c.t_end, "output.plot_times", "times must lie in [0, t_end]");
  req(c.plot_interval >= 0, "output.plot_interval", "must be non-negative");
  req(c.profile_s1 > c.profile_s0, "output.profile_s1", "must exceed output.profile_s0");
  req(c.profile_ds >= 0.0, "output.profile_ds", "must be non-negative");
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  std::string section;
  for (const auto& k : keys()) {
    const auto dot = k.name.find('.');
    const std::string s = k.name.substr(0, dot);
    const std::string v = k.get(c);
    if (v.empty()) continue;
    if (s != section) {
      os << (section.empty() ? "" : "\n") << '[' << s << "]\n";
      section = s;
    }
    os << k.name.substr(dot + 1) << " = " << v << '\n';
  }
  return os.str();
}

AmrOptions amr_options(const RunConfig& c) {
  AmrOptions o;
  o.integrator = c.integrator;
  o.redist = c.redist;
  o.refluxing = c.refluxing;
  o.rerd = c.rerd;
  o.cfl = c.cfl;
  o.bc = c.bc;
  o.gas.gamma = c.gamma;
  o.wsrd_opt.gradients = c.gradients;
  o.wsrd_opt.limit = c.limiter;
  return o;
}

ImplicitFunction implicit_function(const RunConfig& c) {
  switch (c.shape) {
    case Shape::channel:
      return ImplicitFunction::rotated_channel(c.angle_deg * kDegToRad, c.half_width, {c.center_x, c.center_y});
    case Shape::cylinder:
      return ImplicitFunction::circle({c.center_x, c.center_y}, c.radius, FluidSide::outside);
    case Shape::none:
      break;
  }
  return ImplicitFunction::all_fluid();
}

Prim post_shock_state(const Prim& ahead, double m, const Gas& gas) {
  const double g = gas.gamma;
  const double m2 = m * m;
  const double c = std::sqrt(g * ahead.p / ahead.rho);
  const double rho = ahead.rho * (g + 1.0) * m2 / ((g - 1.0) * m2 + 2.0);
  const double p = ahead.p * (1.0 + 2.0 * g / (g + 1.0) * (m2 - 1.0));
  const double u = m * c * (1.0 - ahead.rho / rho);
  return {rho, ahead.u + u, ahead.v, p};
}

Prim initial_state(const RunConfig& c, Point x) {
  switch (c.init) {
    case InitKind::lab_x_split:
      return x.x <= c.position ? c.left : c.right;
    case InitKind::rotated_split: {
      const double th = c.angle_deg * kDegToRad;
      const double s = (x.x - c.center_x) * std::cos(th) + (x.y - c.center_y) * std::sin(th);
      const Prim& w = s <= c.position ? c.left : c.right;
      // Velocities are given along and across the channel.
      return {w.rho, w.u * std::cos(th) - w.v * std::sin(th), w.u * std::sin(th) + w.v * std::cos(th), w.p};
    }
    case InitKind::shock:
      return x.x <= c.position ? post_shock_state(c.right, c.mach, Gas{c.gamma}) : c.right;
  }
  return c.right;
}

Box level_box(const RunConfig& c, int l, const RealBox& r) {
  const int f = 1 << l;
  const double h = (c.xhi - c.xlo) / c.nx / f;
  const double eps = 1e-9;
  Box b({static_cast<int>(std::floor((r.x0 - c.xlo) / h + eps)), static_cast<int>(std::floor((r.y0 - c.ylo) / h + eps))},
        {static_cast<int>(std::ceil((r.x1 - c.xlo) / h - eps)) - 1,
         static_cast<int>(std::ceil((r.y1 - c.ylo) / h - eps)) - 1});
  b = b.coarsen(kRefRatio).refine(kRefRatio);
  const Box dom({0, 0}, {c.nx * f - 1, c.ny * f - 1});
  return b.intersect(dom);
}

}  // namespace ebamr
