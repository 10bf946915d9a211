#pragma once

// Time integration of expanding curvature flows of star-shaped (radial
// representation) or convex (support representation) hypersurfaces in
// R^{n+1}, n = 1, 2.
//
// Variants:
//   radial_original          d rho/dt =  u^alpha rho^delta f(kappa)^{-beta} omega
//   radial_normalized        d rho/dt =  u^alpha rho^delta f(kappa)^{-beta} omega - eta rho
//   support_original         d u/dt   =  psi u^alpha rho^delta sigma_k(A)^{beta/k}
//   support_normalized_sigma_k   same minus eta u
//   support_normalized_gauss d u/dt   =  phi(t) psi u^alpha rho^delta (det A)^{beta/n} - u
//
// with omega = sqrt(1 + |D log rho|^2), A = Hess u + u I, and eta the value
// of the speed factor on the unit sphere, so the unit sphere is stationary
// for the normalized variants to the last bit.  The gauss variant instead
// chooses phi(t) each step so that V_q is conserved; it decreases
// J = U_p - V_q.
//
// Time stepping is explicit midpoint (RK2) with a parabolic CFL step size
// dt = safety * h_min^2 / (n * max over nodes of the diffusion coefficient);
// dt_fixed overrides the estimate verbatim.

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "curvflow/curvature.hpp"
#include "curvflow/grid.hpp"
#include "curvflow/shape.hpp"

namespace curvflow {

enum class FlowVariant {
  radial_original,
  radial_normalized,
  support_original,
  support_normalized_sigma_k,
  support_normalized_gauss,
};

bool is_radial(FlowVariant v);
bool is_original(FlowVariant v);
const char* to_string(FlowVariant v);

struct TimeControls {
  double t_end = std::numeric_limits<double>::infinity();
  long max_steps = 500000;
  double dt_safety = 0.4;
  double dt_fixed = 0.0;  // > 0: use verbatim instead of the CFL estimate
  int record_every = 1;   // history cadence in steps
};

struct StopRules {
  // <= 0 disables a rule.
  double osc_tol = 0.0;        // stop when max rho - min rho <= osc_tol
  double residual_tol = 0.0;   // stop when max|d field/dt| <= tol * max field
  double blow_up_factor = 1e3; // original variants: stop when
                               // min rho > factor * initial max rho
};

struct FlowParams {
  FlowVariant variant = FlowVariant::radial_normalized;
  int n = 2;
  int n_theta = 32;
  int n_phi = 64;  // ignored for n = 1
  double alpha = 0.0;
  double delta = 0.0;
  double beta = 1.0;
  CurvatureSpec curvature;
  PsiSpec psi;
  ShapeSpec initial;
  TimeControls time;
  StopRules stop;
  // support_normalized_sigma_k with alpha+delta+beta < 1: pre-scale the
  // initial datum so its speed ratio starts above eta (the barrier argument
  // then traps it for good).
  bool prescale = true;
  // average the field with its antipodal reflection after every step
  // (restricts the dynamics to origin-symmetric bodies).
  bool symmetrize = false;

  void validate() const;  // throws ConfigError
};

// One history row.  Columns that do not apply to a variant hold the values
// documented in the README (phi: schedule value for the original variants,
// 1 for normalized sigma_k, the conservation integral for gauss; q_min/q_max:
// extrema of the barrier ratio psi u^{alpha-1} rho^delta F^{beta}, for gauss
// the extrema of the unscaled stationarity product).
struct FlowRecord {
  long step = 0;
  double t = 0, tau = 0, dt = 0;
  double min_rho = 0, max_rho = 0;
  double max_grad_gamma = 0;  // radial: max |D log rho|; support: max |Du|/u
  double min_lambda = 0;      // support: min principal radius;
                              // radial: min principal curvature
  double eta = 0, phi = 0;
  double q_min = 0, q_max = 0;
  double u_p = 0, v_q = 0, j_pq = 0;
  double residual = 0;  // max |d field/dt| / max field
};

enum class FlowVerdict { converged, blown_up, reached_t_end, max_steps };
const char* to_string(FlowVerdict v);

struct FlowResult {
  FlowVerdict verdict = FlowVerdict::max_steps;
  Grid grid;
  std::vector<double> field;  // final rho (radial) or u (support)
  std::vector<FlowRecord> history;
  long steps = 0;
  double t_final = 0, tau_final = 0;
  double eta = 0;
  double sigma = 0;    // alpha + delta + beta
  double p = 0, q = 0; // exponent-dictionary labels
  double phi_final = 0;
  double initial_min_rho = 0, initial_max_rho = 0;
};

FlowResult run_flow(const FlowParams& params);

// Same, but integrate from an explicit start field (final rho or u of an
// earlier run on the same grid) instead of params.initial.  Lets a caller
// resume a run with tightened stopping rules without losing progress.
FlowResult run_flow(const FlowParams& params,
                    const std::vector<double>& start_field);

// Optional run observer: on_snapshot fires with the current field at every
// step whose index is a multiple of stride, plus once at the final step
// (stride <= 0 disables it). Called on the driving thread; anything it
// throws propagates out of run_flow.
struct FlowObserver {
  long stride = 0;
  std::function<void(long step, double t, const Grid& g,
                     const std::vector<double>& field)>
      on_snapshot;
};

FlowResult run_flow(const FlowParams& params, const FlowObserver& observer);

// History rows of the most recent run_flow call on this thread that ended in
// NumericalError -- the partial trail a caller can still flush to disk before
// reporting the failure. Cleared whenever a new run starts.
const std::vector<FlowRecord>& last_partial_history();

// Fit min_rho^{1 - sigma} against t over the history window where min_rho
// lies in [lo_factor, hi_factor] * (initial max rho) and return the root of
// the fitted line -- an estimate of the blow-up time of an original-variant
// run.  Throws NumericalError when the window holds fewer than two rows.
double estimate_blow_up_time(const FlowResult& result, double lo_factor = 10.0,
                             double hi_factor = 1000.0);

}  // namespace curvflow
