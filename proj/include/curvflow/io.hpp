#pragma once

// Artifact serialization: history CSV, shape CSV (+ metadata sidecar),
// flow-summary and solve-report JSON documents.
//
// Every number is written with 17 significant digits (or nlohmann's exact
// shortest round-trip form inside JSON), and all iteration is in fixed node /
// row order, so identical runs produce byte-identical files.

#include <string>
#include <vector>

#include "curvflow/config.hpp"
#include "curvflow/flow.hpp"
#include "curvflow/grid.hpp"
#include "curvflow/minkowski.hpp"

namespace curvflow {

// Full-precision text for one double ("%.17g").
std::string format_double(double x);

// Create-or-truncate write; throws NumericalError when the file cannot be
// opened or the write fails (treated as a runtime failure, not a config one).
void write_text_file(const std::string& path, const std::string& text);

// History table with the fixed header
//   step,t,tau,dt,min_rho,max_rho,osc_rho,max_grad_gamma,min_lambda,eta,phi,
//   q_min,q_max,u_p,v_q,j_pq,residual
// (osc_rho = max_rho - min_rho, computed at write time).
std::string history_csv(const std::vector<FlowRecord>& history);
void write_history_csv(const std::string& path,
                       const std::vector<FlowRecord>& history);

// Scalar field on a grid: header "theta,phi,value" (n=2) or "theta,value"
// (n=1), one row per node, row-major in (row j, column k).
std::string field_csv(const Grid& g, const std::vector<double>& field);
void write_field_csv(const std::string& path, const Grid& g,
                     const std::vector<double>& field);

// Sidecar metadata for one shape snapshot: representation kind ("rho" or
// "u"), sphere dimension, grid sizes, step index and flow time.
std::string snapshot_meta_json(const FlowParams& params, const Grid& g,
                               long step, double t);

// Flow-run summary: verdict, step/time totals, unit-sphere constant and
// exponents, final oscillation and residual, the least-squares exponential
// rate of max|D gamma|^2 over the trailing half of the history (when it is
// computable), the fitted blow-up time for blown-up runs, and the resolved
// config (re-running from it reproduces the summary).
std::string flow_summary_json(const RunConfig& cfg, const FlowResult& res,
                              double wall_seconds);

// Solve report: equation and regime, exponents both ways (alpha/delta/
// beta_flow/k and p/q), eta, c0, residual, shape oscillation, step/round
// totals, wall time, the uniqueness-probe distance when the probe ran
// (pass NaN otherwise), and the resolved config.
std::string solve_report_json(const RunConfig& cfg,
                              const MinkowskiResult& res,
                              double probe_distance);

}  // namespace curvflow
