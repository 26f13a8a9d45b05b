#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "ebamr/checks.hpp"
#include "ebamr/run.hpp"

namespace fs = std::filesystem;
using namespace ebamr;

namespace {

constexpr int kOk = 0;
constexpr int kSolverFailure = 1;
constexpr int kConfigError = 2;

fs::path output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("EBAMR_OUTPUT_DIR"); env && *env) return env;
  return "ebamr_out";
}

void report(const SolverError& e) {
  std::cerr << "solver failure: " << e.what() << '\n';
  std::cerr << "  level " << e.level() << ", step " << e.step();
  if (e.has_cell()) std::cerr << ", cell (" << e.cell().i << ", " << e.cell().j << ")";
  std::cerr << '\n';
}

int cmd_run(const std::string& cfg_path, const std::string& out_flag, bool quiet) {
  RunConfig c;
  try {
    c = load_config(cfg_path);
  } catch (const std::exception& e) {
    std::cerr << cfg_path << ": " << e.what() << '\n';
    return kConfigError;
  }
  const fs::path out = output_dir(out_flag);
  fs::create_directories(out);
  {
    std::ofstream f(out / "config.cfg");
    f << serialize_config(c);
  }
  try {
    const RunResult r = run(c, out, quiet ? nullptr : &std::cout);
    std::cout << "finished: " << r.steps << " steps, t=" << r.time << ", max relative defect "
              << r.ledger.max_relative_defect() << ", output in " << out.string() << '\n';
  } catch (const SolverError& e) {
    report(e);
    return kSolverFailure;
  } catch (const ValidationError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  return kOk;
}

int cmd_validate(const ValidateOptions& opt) {
  const auto results = validate_suite(opt, &std::cout);
  int failed = 0;
  for (const auto& r : results) failed += r.pass ? 0 : 1;
  std::cout << results.size() - failed << " passed, " << failed << " failed\n";
  return failed ? kSolverFailure : kOk;
}

int cmd_geom_dump(const std::string& cfg_path, const std::string& out_flag) {
  RunConfig c;
  try {
    c = load_config(cfg_path);
  } catch (const std::exception& e) {
    std::cerr << cfg_path << ": " << e.what() << '\n';
    return kConfigError;
  }
  const fs::path out = output_dir(out_flag);
  fs::create_directories(out);
  try {
    const auto h = build_hierarchy(c);
    for (int l = 0; l <= h->finest(); ++l) {
      const fs::path p = out / ("geometry_level_" + std::to_string(l) + ".csv");
      std::ofstream f(p);
      write_geometry_csv(h->level(l).geom, f);
      std::cout << p.string() << '\n';
    }
  } catch (const SolverError& e) {
    report(e);
    return kSolverFailure;
  } catch (const ValidationError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cut-cell compressible Euler solver on block-structured AMR"};
  app.require_subcommand(1);

  std::string cfg, out;
  bool quiet = false;
  auto* run_cmd = app.add_subcommand("run", "Run a configuration to its end time");
  run_cmd->add_option("config", cfg, "Configuration file")->required();
  run_cmd->add_option("-o,--out", out, "Output directory (default: $EBAMR_OUTPUT_DIR or ./ebamr_out)");
  run_cmd->add_flag("-q,--quiet", quiet, "No progress lines");

  ValidateOptions vopt;
  bool no_rerd = false;
  auto* val_cmd = app.add_subcommand("validate", "Run the property checks and print a table");
  val_cmd->add_flag("--no-rerd", no_rerd, "Disable re-redistribution in the conservation runs");
  val_cmd->add_flag("--corrupt-matrix", vopt.corrupt_matrix, "Perturb one merge-matrix entry (test hook)");
  val_cmd->add_option("--trials", vopt.trials, "Randomized meshes per matrix check")->check(CLI::PositiveNumber);

  std::string gcfg, gout;
  auto* geo_cmd = app.add_subcommand("geom-dump", "Write the cut-cell geometry of every level as CSV");
  geo_cmd->add_option("config", gcfg, "Configuration file")->required();
  geo_cmd->add_option("-o,--out", gout, "Output directory (default: $EBAMR_OUTPUT_DIR or ./ebamr_out)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  if (*run_cmd) return cmd_run(cfg, out, quiet);
  if (*val_cmd) {
    vopt.rerd = !no_rerd;
    return cmd_validate(vopt);
  }
  return cmd_geom_dump(gcfg, gout);
}
