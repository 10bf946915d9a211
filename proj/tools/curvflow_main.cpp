// curvflow command-line driver.
//
//   curvflow flow <config.json>      run a flow, write history/shape/summary
//   curvflow solve <config.json>     solve a stationary problem, write report
//   curvflow oracle r t alpha delta beta eta
//                                    print the round-ball radius at time t
//   curvflow validate quick|full     run the self-check suites
//
// Exit codes: 0 ok, 2 config error, 3 regime rejection, 4 numerical failure.
// CURVFLOW_THREADS caps the worker count (default: all cores).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "curvflow/config.hpp"
#include "curvflow/errors.hpp"
#include "curvflow/exact.hpp"
#include "curvflow/flow.hpp"
#include "curvflow/io.hpp"
#include "curvflow/minkowski.hpp"
#include "curvflow/validate.hpp"

namespace {

using namespace curvflow;
namespace fs = std::filesystem;

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void ensure_output_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec && !fs::is_directory(dir))
    throw ConfigError("cannot create output_dir \"" + dir +
                      "\": " + ec.message());
}

// ---------------------------------------------------------------------------
// flow
// ---------------------------------------------------------------------------

int cmd_flow(const std::string& config_path) {
  const RunConfig cfg = load_run_config(config_path, RunMode::flow);
  ensure_output_dir(cfg.output_dir);

  FlowObserver obs;
  if (cfg.snapshot_stride > 0) {
    obs.stride = cfg.snapshot_stride;
    obs.on_snapshot = [&cfg](long step, double t, const Grid& g,
                             const std::vector<double>& field) {
      const std::string stem =
          join(cfg.output_dir, "snapshot_" + std::to_string(step));
      write_field_csv(stem + ".csv", g, field);
      write_text_file(stem + ".json",
                      snapshot_meta_json(cfg.flow, g, step, t));
    };
  }

  const auto t0 = std::chrono::steady_clock::now();
  FlowResult res;
  try {
    res = run_flow(cfg.flow, obs);
  } catch (const NumericalError&) {
    // flush whatever trail the run left before reporting the failure
    // (header-only when it died before the first record)
    write_history_csv(join(cfg.output_dir, "history.csv"),
                      last_partial_history());
    throw;
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  write_history_csv(join(cfg.output_dir, "history.csv"), res.history);
  write_field_csv(join(cfg.output_dir, "shape.csv"), res.grid, res.field);
  write_text_file(join(cfg.output_dir, "summary.json"),
                  flow_summary_json(cfg, res, wall));

  const FlowRecord& last = res.history.back();
  std::printf("%s after %ld steps: t = %.6g, osc rho = %.3e, residual = %.3e\n",
              to_string(res.verdict), res.steps, res.t_final,
              last.max_rho - last.min_rho, last.residual);
  std::printf("outputs in %s\n", cfg.output_dir.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

int cmd_solve(const std::string& config_path) {
  const RunConfig cfg = load_run_config(config_path, RunMode::solve);
  ensure_output_dir(cfg.output_dir);

  const MinkowskiResult res = solve_minkowski(cfg.problem, cfg.solve);
  double probe = std::numeric_limits<double>::quiet_NaN();
  if (cfg.probe.enabled)
    probe = uniqueness_probe(cfg.problem, cfg.solve, cfg.probe.start_a,
                             cfg.probe.start_b);

  write_field_csv(join(cfg.output_dir, "solution.csv"), res.grid, res.u);
  write_text_file(join(cfg.output_dir, "report.json"),
                  solve_report_json(cfg, res, probe));

  std::printf("regime: %s\n", res.regime.c_str());
  std::printf(
      "solved in %d round(s), %ld steps: residual = %.3e, osc ratio = %.3e, "
      "c0 = %.6g\n",
      res.rounds, res.steps, res.residual, res.osc_ratio, res.c0);
  if (std::isfinite(probe))
    std::printf("uniqueness probe distance = %.3e\n", probe);
  std::printf("outputs in %s\n", cfg.output_dir.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// oracle / validate
// ---------------------------------------------------------------------------

int cmd_oracle(double r0, double t, double alpha, double delta, double beta,
               double eta) {
  const double sigma = exact::sigma_total(alpha, delta, beta);
  std::printf("%.17g\n", exact::ball_radius(r0, t, eta, sigma));
  return 0;
}

int cmd_validate(const std::string& level) {
  const ValidateLevel lv =
      level == "quick" ? ValidateLevel::quick : ValidateLevel::full;
  const std::vector<CheckResult> checks = run_validation(lv);
  std::fputs(format_check_table(checks).c_str(), stdout);
  return all_passed(checks) ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "curvflow: anisotropic expanding curvature flows of star-shaped and "
      "convex hypersurfaces, and the stationary Minkowski-type problems they "
      "solve"};
  app.require_subcommand(1);

  std::string flow_config, solve_config, level;
  double r0 = 1, t = 0, alpha = 0, delta = 0, beta = 1, eta = 1;

  CLI::App* flow = app.add_subcommand("flow", "run a flow from a JSON config");
  flow->add_option("config", flow_config, "config file path")->required();

  CLI::App* solve =
      app.add_subcommand("solve", "solve a stationary problem from a config");
  solve->add_option("config", solve_config, "config file path")->required();

  CLI::App* oracle = app.add_subcommand(
      "oracle", "closed-form radius of an evolving round ball");
  oracle->add_option("r", r0, "initial radius")->required();
  oracle->add_option("t", t, "time")->required();
  oracle->add_option("alpha", alpha, "radius exponent")->required();
  oracle->add_option("delta", delta, "contact-distance exponent")->required();
  oracle->add_option("beta", beta, "curvature exponent")->required();
  oracle->add_option("eta", eta, "unit-sphere speed")->required();

  CLI::App* validate =
      app.add_subcommand("validate", "run the self-check suite");
  validate->add_option("level", level, "quick or full")
      ->required()
      ->check(CLI::IsMember({"quick", "full"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // bad usage is a config error
  }

  try {
    if (flow->parsed()) return cmd_flow(flow_config);
    if (solve->parsed()) return cmd_solve(solve_config);
    if (oracle->parsed()) return cmd_oracle(r0, t, alpha, delta, beta, eta);
    if (validate->parsed()) return cmd_validate(level);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const RegimeError& e) {
    std::fprintf(stderr, "regime rejection: %s\n", e.what());
    return 3;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 4;
  }
  return 0;
}
