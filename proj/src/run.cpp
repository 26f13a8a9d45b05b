#include "ebamr/run.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace ebamr {

namespace fs = std::filesystem;

namespace {

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

std::string step_name(const char* prefix, int step) {
  std::ostringstream os;
  os << prefix << std::setw(5) << std::setfill('0') << step;
  return os.str();
}

void write_registers(const Hierarchy& h, int step, const fs::path& outdir) {
  for (int l = 0; l < h.finest(); ++l) {
    const RedistRegister& rr = h.redist_register(l);
    if (rr.covered.empty()) continue;
    std::ofstream f(outdir / (step_name("registers_", step) + "_level" + std::to_string(l) + ".csv"));
    write_register_csv(rr, reflux_by_cell(h.flux_register(l)), h.applied_correction(l), f);
  }
}

}  // namespace

std::unique_ptr<Hierarchy> build_hierarchy(const RunConfig& c) {
  const double h0 = (c.xhi - c.xlo) / c.nx;
  auto h = std::make_unique<Hierarchy>(implicit_function(c), Box({0, 0}, {c.nx - 1, c.ny - 1}), h0, h0,
                                       Point{c.xlo, c.ylo}, c.levels, amr_options(c));
  auto init = [&c](Point x) { return initial_state(c, x); };
  h->initialize(init);
  if (c.mode == RefineMode::static_boxes) {
    for (int l = 1; l < c.levels; ++l) h->set_valid(l, level_box(c, l, c.boxes[l - 1]));
    if (!h->properly_nested()) throw ValidationError("amr.box2", "refined boxes are not properly nested");
  } else {
    regrid_all(*h, c);
  }
  h->initialize(init);
  return h;
}

void regrid_all(Hierarchy& h, const RunConfig& c) {
  if (c.mode != RefineMode::dynamic) return;
  for (int l = 0; l + 1 < c.levels && l <= h.finest(); ++l) h.regrid(l, c.threshold, c.buffer);
}

Line profile_line(const RunConfig& c) {
  Line ln;
  if (c.shape == Shape::channel) {
    ln.theta = c.angle_deg * kDegToRad;
    ln.center = {c.center_x, c.center_y};
  } else {
    ln.center = {c.xlo, c.shape == Shape::cylinder ? c.center_y : 0.5 * (c.ylo + c.yhi)};
  }
  if (c.init == InitKind::rotated_split) {
    ln.center = {ln.center.x + c.position * std::cos(ln.theta), ln.center.y + c.position * std::sin(ln.theta)};
  } else {
    // Shift along the line to the point with lab x = position.
    const double s = (c.position - ln.center.x) / std::cos(ln.theta);
    ln.center = {c.position, ln.center.y + s * std::sin(ln.theta)};
  }
  return ln;
}

std::vector<ProfileSample> sample_profile(const Hierarchy& h, const RunConfig& c) {
  const Line ln = profile_line(c);
  double ds = c.profile_ds;
  if (ds <= 0.0) ds = h.level(h.finest()).geom.dx();
  auto prof = centerline_profile(h, ln.center, ln.theta, c.profile_s0, c.profile_s1, ds);
  if (c.init == InitKind::rotated_split) {
    attach_exact(prof, c.left, c.right, h.time(), h.options().gas);
  } else if (c.init == InitKind::lab_x_split && std::cos(ln.theta) == 1.0) {
    attach_exact(prof, c.left, c.right, h.time(), h.options().gas);
  }
  return prof;
}

fs::path write_plotfile(const Hierarchy& h, int step, const fs::path& outdir) {
  const fs::path dir = outdir / step_name("plt_", step);
  fs::create_directories(dir);
  nlohmann::json m;
  m["step"] = step;
  m["time"] = h.time();
  m["num_levels"] = h.finest() + 1;
  m["levels"] = nlohmann::json::array();
  for (int l = 0; l <= h.finest(); ++l) {
    const Level& L = h.level(l);
    {
      std::ofstream f(dir / ("level_" + std::to_string(l) + ".csv"));
      write_level_csv(L.U, L.geom, L.valid, h.options().gas, f);
    }
    m["levels"].push_back({{"level", l},
                           {"dx", L.geom.dx()},
                           {"box", {L.valid.lo.i, L.valid.lo.j, L.valid.hi.i, L.valid.hi.j}},
                           {"file", "level_" + std::to_string(l) + ".csv"}});
  }
  {
    std::ofstream f(dir / "schlieren.csv");
    write_schlieren_csv(h, f);
  }
  std::ofstream f(dir / "manifest.json");
  f << m.dump(2) << '\n';
  return dir;
}

RunResult run(const RunConfig& c, const fs::path& outdir, std::ostream* log) {
  validate_config(c);
  RunResult res;
  res.ledger = ConservationLedger(c.refluxing, c.rerd);
  const bool out = !outdir.empty();
  if (out) fs::create_directories(outdir);
  auto h = build_hierarchy(c);
  std::vector<double> pending = c.plot_times;
  std::sort(pending.begin(), pending.end());
  auto flush = [&] {
    if (!out) return;
    if (c.ledger) {
      std::ofstream f(outdir / "ledger.csv");
      res.ledger.write_csv(f);
    }
  };
  auto plot_due = [&](double t) {
    bool due = false;
    while (!pending.empty() && pending.front() <= t * (1.0 + 1e-12) + 1e-14) {
      pending.erase(pending.begin());
      due = true;
    }
    return due;
  };
  if (plot_due(0.0) && out) res.plotfiles.push_back(write_plotfile(*h, 0, outdir));
  int step = 0;
  try {
    while (h->time() < c.t_end * (1.0 - 1e-12) && step < c.max_steps) {
      if (step > 0 && c.mode == RefineMode::dynamic && step % c.interval == 0) regrid_all(*h, c);
      double dt = h->stable_dt();
      const double t = h->time();
      if (t + dt > c.t_end) dt = c.t_end - t;
      if (!pending.empty() && t + dt > pending.front()) dt = std::max(pending.front() - t, 1e-14);
      const StepTotals tot = h->advance(dt);
      ++step;
      res.ledger.record(step, h->time(), dt, tot, composite_abs_totals(*h));
      if (out && c.register_dump) write_registers(*h, step, outdir);
      const bool cadence = c.plot_interval > 0 && step % c.plot_interval == 0;
      if ((plot_due(h->time()) || cadence) && out) res.plotfiles.push_back(write_plotfile(*h, step, outdir));
      if (log && (step % 10 == 0 || h->time() >= c.t_end * (1.0 - 1e-12))) {
        const LedgerRow& r = res.ledger.rows().back();
        *log << "step " << step << " t=" << h->time() << " dt=" << dt << " finest=" << h->finest()
             << " defect_mass=" << r.defect[0] << '\n';
      }
    }
  } catch (SolverError& e) {
    e.at_step(step + 1);
    flush();
    throw;
  }
  res.steps = step;
  res.time = h->time();
  res.hierarchy = std::shared_ptr<Hierarchy>(std::move(h));
  const Hierarchy& hf = *res.hierarchy;
  if (c.profile) res.profile = sample_profile(hf, c);
  flush();
  if (out) {
    if (res.plotfiles.empty() || res.plotfiles.back().filename() != step_name("plt_", step)) res.plotfiles.push_back(write_plotfile(hf, step, outdir));
    if (c.profile) {
      std::ofstream f(outdir / "profile.csv");
      write_profile_csv(res.profile, f);
    }
  }
  return res;
}

}  // namespace ebamr
