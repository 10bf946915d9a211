#include "curvflow/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include "json.hpp"

#include "curvflow/errors.hpp"
#include "curvflow/numeric.hpp"

namespace curvflow {

namespace {

using nlohmann::json;

// Least-squares exponential rate of max|D gamma|^2 over the trailing half of
// the history: fit log(max_grad_gamma^2) ~ a + rate * t on the rows with
// t >= t_final / 2 and a strictly positive gradient. Returns false when
// fewer than two usable rows remain (already-flat runs, blow-ups).
bool fit_gradient_decay(const std::vector<FlowRecord>& history, double t_final,
                        LinearFit& fit) {
  std::vector<double> ts, logs;
  for (const FlowRecord& r : history) {
    if (r.t < 0.5 * t_final) continue;
    if (!(r.max_grad_gamma > 0) || !std::isfinite(r.max_grad_gamma)) continue;
    ts.push_back(r.t);
    logs.push_back(2.0 * std::log(r.max_grad_gamma));
  }
  if (ts.size() < 2 || ts.front() == ts.back()) return false;
  fit = linear_fit(ts, logs);
  return std::isfinite(fit.slope) && std::isfinite(fit.r2);
}

json config_json(const RunConfig& cfg) {
  return json::parse(resolved_config_json(cfg));
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw NumericalError("cannot open output file: " + path);
  out << text;
  out.flush();
  if (!out) throw NumericalError("write failed: " + path);
}

// ---------------------------------------------------------------------------
// history CSV
// ---------------------------------------------------------------------------

std::string history_csv(const std::vector<FlowRecord>& history) {
  std::string s =
      "step,t,tau,dt,min_rho,max_rho,osc_rho,max_grad_gamma,min_lambda,eta,"
      "phi,q_min,q_max,u_p,v_q,j_pq,residual\n";
  for (const FlowRecord& r : history) {
    s += std::to_string(r.step);
    const double cols[] = {r.t,       r.tau,
                           r.dt,      r.min_rho,
                           r.max_rho, r.max_rho - r.min_rho,
                           r.max_grad_gamma, r.min_lambda,
                           r.eta,     r.phi,
                           r.q_min,   r.q_max,
                           r.u_p,     r.v_q,
                           r.j_pq,    r.residual};
    for (double c : cols) {
      s += ',';
      s += format_double(c);
    }
    s += '\n';
  }
  return s;
}

void write_history_csv(const std::string& path,
                       const std::vector<FlowRecord>& history) {
  write_text_file(path, history_csv(history));
}

// ---------------------------------------------------------------------------
// field CSV
// ---------------------------------------------------------------------------

std::string field_csv(const Grid& g, const std::vector<double>& field) {
  std::string s;
  if (g.n == 1) {
    s = "theta,value\n";
    for (int k = 0; k < g.n_theta; ++k) {
      s += format_double(g.theta[std::size_t(k)]);
      s += ',';
      s += format_double(field[std::size_t(k)]);
      s += '\n';
    }
  } else {
    s = "theta,phi,value\n";
    for (int j = 0; j < g.n_theta; ++j)
      for (int k = 0; k < g.n_phi; ++k) {
        s += format_double(g.theta[std::size_t(j)]);
        s += ',';
        s += format_double(k * g.h_phi);
        s += ',';
        s += format_double(field[std::size_t(g.index(j, k))]);
        s += '\n';
      }
  }
  return s;
}

void write_field_csv(const std::string& path, const Grid& g,
                     const std::vector<double>& field) {
  write_text_file(path, field_csv(g, field));
}

std::string snapshot_meta_json(const FlowParams& params, const Grid& g,
                               long step, double t) {
  json j;
  j["representation"] = is_radial(params.variant) ? "rho" : "u";
  j["n"] = g.n;
  j["n_theta"] = g.n_theta;
  j["n_phi"] = g.n_phi;
  j["step"] = step;
  j["t"] = t;
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// flow summary
// ---------------------------------------------------------------------------

std::string flow_summary_json(const RunConfig& cfg, const FlowResult& res,
                              double wall_seconds) {
  json j;
  j["verdict"] = to_string(res.verdict);
  j["steps"] = res.steps;
  j["t_final"] = res.t_final;
  j["tau_final"] = res.tau_final;
  j["eta"] = res.eta;
  j["sigma"] = res.sigma;
  j["p"] = res.p;
  j["q"] = res.q;
  j["phi_final"] = res.phi_final;
  j["initial_min_rho"] = res.initial_min_rho;
  j["initial_max_rho"] = res.initial_max_rho;
  if (!res.history.empty()) {
    const FlowRecord& last = res.history.back();
    j["final_min_rho"] = last.min_rho;
    j["final_max_rho"] = last.max_rho;
    j["final_osc_rho"] = last.max_rho - last.min_rho;
    j["final_max_grad_gamma"] = last.max_grad_gamma;
    j["final_residual"] = last.residual;
    LinearFit fit;
    if (fit_gradient_decay(res.history, res.t_final, fit)) {
      j["grad_sq_decay_rate"] = fit.slope;
      j["grad_sq_decay_r2"] = fit.r2;
    }
  }
  if (res.verdict == FlowVerdict::blown_up) {
    try {
      j["t_star_estimate"] = estimate_blow_up_time(res);
    } catch (const NumericalError&) {
      // blow-up window too short to fit a line; leave the key out
    }
  }
  j["wall_seconds"] = wall_seconds;
  j["config"] = config_json(cfg);
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// solve report
// ---------------------------------------------------------------------------

std::string solve_report_json(const RunConfig& cfg, const MinkowskiResult& res,
                              double probe_distance) {
  json j;
  j["equation"] = to_string(cfg.problem.equation);
  j["regime"] = res.regime;
  j["subsequential"] = res.subsequential;
  j["n"] = cfg.problem.n;
  j["k"] = cfg.problem.k;
  j["p"] = res.p;
  j["q"] = res.q;
  j["alpha"] = res.alpha;
  j["delta"] = res.delta;
  j["beta_flow"] = res.beta_flow;
  j["eta"] = res.eta;
  j["c0"] = res.c0;
  j["residual"] = res.residual;
  j["osc_ratio"] = res.osc_ratio;
  if (!res.u.empty()) {
    double lo = res.u[0], hi = res.u[0];
    for (double v : res.u) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double mean = integrate(res.grid, res.u) / res.grid.area;
    j["min_u"] = lo;
    j["max_u"] = hi;
    j["mean_u"] = mean;
  }
  j["steps"] = res.steps;
  j["rounds"] = res.rounds;
  j["tau_final"] = res.tau_final;
  j["verdict"] = to_string(res.verdict);
  if (std::isfinite(probe_distance))
    j["uniqueness_probe_distance"] = probe_distance;
  j["wall_seconds"] = res.wall_seconds;
  j["config"] = config_json(cfg);
  return j.dump(2);
}

}  // namespace curvflow
