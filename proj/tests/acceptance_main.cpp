// Acceptance sweep: eight end-to-end scenarios, one per headline behavior of
// the engine.  Each prints a single [PASS]/[FAIL] line with the measured
// numbers; the binary exits 0 only when every requested scenario passes.
//
//   1 ball_expansion     round bodies follow the closed-form radius ODE,
//                        second order in dt
//   2 blow_up_fit        the un-normalized flow escapes in finite time and
//                        the tail fit recovers the exact blow-up instant
//   3 aniso_convergence  the normalized flow drives a lopsided star-shaped
//                        graph to the round sphere at an exponential rate
//   4 ellipsoid_rounding conserving flow: ellipsoid -> ball of equal
//                        q-volume; un-normalized flow: eccentricity decays
//                        monotonically while expanding
//   5 stationary_solve   the stationary solvers hit their residual targets
//                        and two different starts land on the same body
//   6 entropy_monotone   the conserving flow's entropy never rises and the
//                        conservation defect shrinks ~4x per grid refinement
//   7 barrier_monotone   once the speed ratio clears the threshold, its
//                        envelope is trapped (max never rises, min never
//                        falls)
//   8 self_checks        curvature kernels vs brute force / finite
//                        differences, stationary balls stay put bitwise,
//                        and the built-in validation table is clean
//
// Usage: curvflow_acceptance [index ...]   (1-based; no arguments = all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <string>
#include <vector>

#include "curvflow/curvature.hpp"
#include "curvflow/exact.hpp"
#include "curvflow/flow.hpp"
#include "curvflow/functionals.hpp"
#include "curvflow/grid.hpp"
#include "curvflow/minkowski.hpp"
#include "curvflow/numeric.hpp"
#include "curvflow/shape.hpp"
#include "curvflow/validate.hpp"

#include "oracle_helpers.hpp"

namespace {

using namespace curvflow;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string strf(const char* fmt, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  return std::string(buf);
}

double max_rel_err(const std::vector<double>& v, double target) {
  double e = 0.0;
  for (double x : v) e = std::max(e, std::abs(x - target) / target);
  return e;
}

// ---------------------------------------------------------------------------
// 1. ball_expansion: a round ball stays round bitwise and its radius tracks
//    the closed-form solution of r' = eta r^sigma; halving dt cuts the time
//    error by ~4 (the stepper is second order and a ball has no spatial
//    truncation error).
// ---------------------------------------------------------------------------

Outcome ball_expansion() {
  auto run = [](int nt, int np, double dt) {
    FlowParams P;
    P.variant = FlowVariant::radial_original;
    P.n = 2;
    P.n_theta = nt;
    P.n_phi = np;
    P.alpha = 0.0;
    P.delta = 0.0;
    P.beta = 1.0;
    P.curvature.kind = CurvatureKind::sigma_k_root;
    P.curvature.k = 2;
    P.curvature.argument = CurvatureArgument::principal_curvatures;
    P.initial.kind = ShapeSpec::Kind::ball;
    P.initial.radius = 1.0;
    P.time.dt_fixed = dt;
    P.time.t_end = 0.5;
    P.time.record_every = 64;
    P.stop.blow_up_factor = 1e9;  // keep the blow-up rule out of the way
    return run_flow(P);
  };
  const FlowResult A = run(32, 64, 2e-4);
  const FlowResult B = run(64, 128, 1e-4);
  const double target_a = exact::ball_radius(1.0, 0.5, A.eta, A.sigma);
  const double target_b = exact::ball_radius(1.0, 0.5, B.eta, B.sigma);
  const double err_a = max_rel_err(A.field, target_a);
  const double err_b = max_rel_err(B.field, target_b);
  const double ratio =
      err_b > 0.0 ? err_a / err_b : std::numeric_limits<double>::infinity();
  const bool pass = A.verdict == FlowVerdict::reached_t_end &&
                    B.verdict == FlowVerdict::reached_t_end &&
                    err_a <= 1e-6 && ratio >= 3.5;
  return {pass, strf("radius(0.5) = %.9f (exact %.9f), rel err %.3e, "
                     "dt-halving ratio %.2f",
                     A.field[0], target_a, err_a, ratio)};
}

// ---------------------------------------------------------------------------
// 2. blow_up_fit: with alpha + delta + beta > 1 the un-normalized support
//    flow reaches infinity in finite time; fitting rho^{1-sigma} against t
//    over the escape tail recovers the exact blow-up instant.
// ---------------------------------------------------------------------------

Outcome blow_up_fit() {
  FlowParams P;
  P.variant = FlowVariant::support_original;
  P.n = 2;
  P.n_theta = 16;  // a ball is spatially exact, so the grid can stay small
  P.n_phi = 32;
  P.alpha = 0.0;
  P.delta = 0.0;
  P.beta = 2.0;
  P.curvature.kind = CurvatureKind::sigma_k_root;
  P.curvature.k = 2;
  P.curvature.argument = CurvatureArgument::principal_radii;
  P.initial.kind = ShapeSpec::Kind::ball;
  P.initial.radius = 1.0;
  P.stop.blow_up_factor = 1500.0;
  const FlowResult R = run_flow(P);
  if (R.verdict != FlowVerdict::blown_up)
    return {false, strf("expected a blow-up verdict, got %s after %ld steps",
                        to_string(R.verdict), R.steps)};
  const double t_exact = exact::blow_up_time(1.0, R.eta, R.sigma);
  const double t_hat = estimate_blow_up_time(R, 10.0, 1000.0);
  const double err = std::abs(t_hat - t_exact) / t_exact;
  return {err <= 0.02,
          strf("fitted t* = %.5f (exact %.5f), rel err %.3e, %ld steps",
               t_hat, t_exact, err, R.steps)};
}

// ---------------------------------------------------------------------------
// 3. aniso_convergence: the normalized expanding flow started from a
//    lopsided star-shaped graph meets its oscillation stopping rule, and the
//    gradient decays at a uniform exponential rate (straight line in the
//    log, negative slope).
// ---------------------------------------------------------------------------

Outcome aniso_convergence() {
  FlowParams P;
  P.variant = FlowVariant::radial_normalized;
  P.n = 2;
  P.n_theta = 32;
  P.n_phi = 64;
  P.alpha = -1.0;
  P.delta = 0.0;
  P.beta = 1.0;
  P.curvature.kind = CurvatureKind::sigma_k_root;
  P.curvature.k = 1;
  P.curvature.argument = CurvatureArgument::principal_curvatures;
  P.initial.kind = ShapeSpec::Kind::radial_graph;
  P.initial.radius = 1.0;
  P.initial.c = 0.3;
  P.initial.axis = {0.0, 0.0, 1.0};
  P.stop.osc_tol = 1e-3;
  P.time.record_every = 1;
  const FlowResult R = run_flow(P);
  if (R.verdict != FlowVerdict::converged)
    return {false, strf("expected convergence, got %s after %ld steps",
                        to_string(R.verdict), R.steps)};
  const double osc = R.history.back().max_rho - R.history.back().min_rho;

  // Exponential decay of the gradient: fit 2 log(max |D log rho|) over the
  // trailing half of the run and ask for a clean negative slope.
  std::vector<double> ts, ys;
  for (const FlowRecord& r : R.history)
    if (r.t >= 0.5 * R.t_final && r.max_grad_gamma > 0.0) {
      ts.push_back(r.t);
      ys.push_back(2.0 * std::log(r.max_grad_gamma));
    }
  if (ts.size() < 10)
    return {false, strf("too few usable history rows (%zu)", ts.size())};
  const LinearFit fit = linear_fit(ts, ys);
  const bool pass = osc <= 1e-3 && fit.slope < 0.0 && fit.r2 >= 0.99;
  return {pass, strf("final osc %.3e, gradient decay rate %.3f (r2 %.4f), "
                     "%ld steps",
                     osc, fit.slope, fit.r2, R.steps)};
}

// ---------------------------------------------------------------------------
// 4. ellipsoid_rounding: (a) the conserving flow drives an ellipsoid to the
//    ball enclosing the same q-volume; (b) under the un-normalized flow the
//    relative oscillation (eccentricity) decays monotonically while the body
//    expands.
// ---------------------------------------------------------------------------

Outcome ellipsoid_rounding() {
  // (a) conserving variant, psi == 1, ellipsoid with semi-axes (1, 1, 1.4).
  FlowParams P;
  P.variant = FlowVariant::support_normalized_gauss;
  P.n = 2;
  P.n_theta = 32;
  P.n_phi = 64;
  P.alpha = 0.0;
  P.delta = 0.0;
  P.beta = 2.0;
  P.curvature.kind = CurvatureKind::sigma_k_root;
  P.curvature.k = 2;
  P.curvature.argument = CurvatureArgument::principal_radii;
  P.initial.kind = ShapeSpec::Kind::ellipsoid;
  P.initial.semi_axes = {1.0, 1.0, 1.4};
  P.stop.osc_tol = 1e-3;
  const FlowResult A = run_flow(P);
  if (A.verdict != FlowVerdict::converged)
    return {false, strf("conserving run: expected convergence, got %s",
                        to_string(A.verdict))};
  SupportGeometry sg;
  sg.build(A.grid, A.field);
  std::vector<double> rho3(sg.rho.size());
  for (std::size_t i = 0; i < rho3.size(); ++i)
    rho3[i] = sg.rho[i] * sg.rho[i] * sg.rho[i];
  const double mean_q = integrate(A.grid, rho3) / A.grid.area;
  // mean of rho^3 over the sphere = product of the semi-axes, so the
  // equal-volume ball has radius cbrt(1.4)
  const double r_ball = std::cbrt(1.4);
  const double r_meas = std::cbrt(mean_q);
  const double osc_n =
      (*std::max_element(sg.rho.begin(), sg.rho.end()) -
       *std::min_element(sg.rho.begin(), sg.rho.end())) / r_meas;
  double shape_err = 0.0;
  for (double r : sg.rho)
    shape_err = std::max(shape_err, std::abs(r / r_ball - 1.0));
  const bool pass_a = osc_n <= 1e-3 && shape_err <= 1e-2;

  // (b) un-normalized variant from the same ellipsoid: the relative
  // oscillation must never increase over the trailing half of the run.
  P.variant = FlowVariant::support_original;
  P.stop.osc_tol = 0.0;
  P.stop.blow_up_factor = 100.0;
  P.time.record_every = 1;
  const FlowResult B = run_flow(P);
  if (B.verdict != FlowVerdict::blown_up)
    return {false, strf("expanding run: expected a blow-up verdict, got %s",
                        to_string(B.verdict))};
  bool mono = true;
  double worst_rise = 0.0, first_ratio = 0.0, last_ratio = 0.0;
  bool have_prev = false;
  double prev = 0.0;
  for (const FlowRecord& r : B.history) {
    if (r.t < 0.5 * B.t_final) continue;
    const double ratio = (r.max_rho - r.min_rho) / r.min_rho;
    if (!have_prev) first_ratio = ratio;
    if (have_prev) {
      worst_rise = std::max(worst_rise, ratio - prev);
      if (ratio > prev + 1e-9 * (1.0 + ratio)) mono = false;
    }
    prev = ratio;
    last_ratio = ratio;
    have_prev = true;
  }
  const bool pass = pass_a && mono;
  return {pass, strf("ball limit: osc %.3e, radius err %.3e (target %.6f); "
                     "expanding: eccentricity %.3e -> %.3e, worst rise %.1e",
                     osc_n, shape_err, r_ball, first_ratio, last_ratio,
                     worst_rise)};
}

// ---------------------------------------------------------------------------
// 5. stationary_solve: the stationary solvers meet their residual targets on
//    a curvature-order-1 problem and a determinant-order dual problem, and
//    two different starts land on the same body.
// ---------------------------------------------------------------------------

Outcome stationary_solve() {
  SolveOptions opt;  // 48 x 96, residual target 1e-3

  // sigma_1 problem with p = 4: the exact solution is the ball u = sqrt(2).
  MinkowskiProblem cm;
  cm.equation = EquationKind::lp_cm;
  cm.n = 2;
  cm.k = 1;
  cm.p = 4.0;
  cm.beta = 1.0;
  const MinkowskiResult rc = solve_minkowski(cm, opt);
  const double u_exact = std::sqrt(2.0);
  const double err_c = max_rel_err(rc.u, u_exact);
  ShapeSpec probe_a, probe_b;
  probe_a.kind = ShapeSpec::Kind::ellipsoid;
  probe_a.semi_axes = {1.0, 1.0, 1.2};
  probe_b.kind = ShapeSpec::Kind::ball;
  probe_b.radius = 0.9;
  const double gap_c = uniqueness_probe(cm, opt, probe_a, probe_b);
  const bool pass_c = rc.residual <= 1e-3 && rc.osc_ratio <= 1e-3 &&
                      std::abs(rc.c0 - 2.0) <= 1e-6 && err_c <= 1e-2 &&
                      gap_c <= 1e-3;

  // dual problem with p = 3, q = 2: the exact solution is the unit ball,
  // and the dilation absorption must land there from any start.
  MinkowskiProblem du;
  du.equation = EquationKind::lp_dual_minkowski;
  du.n = 2;
  du.k = 2;
  du.p = 3.0;
  du.q = 2.0;
  SolveOptions opt_d = opt;
  opt_d.initial.kind = ShapeSpec::Kind::ellipsoid;
  opt_d.initial.semi_axes = {1.0, 1.0, 1.3};
  const MinkowskiResult rd = solve_minkowski(du, opt_d);
  const double err_d = max_rel_err(rd.u, 1.0);
  ShapeSpec probe_c, probe_d;
  probe_c.kind = ShapeSpec::Kind::ellipsoid;
  probe_c.semi_axes = {1.0, 1.0, 1.25};
  probe_d.kind = ShapeSpec::Kind::ball;
  probe_d.radius = 0.8;
  const double gap_d = uniqueness_probe(du, opt_d, probe_c, probe_d);
  const bool pass_d = rd.residual <= 1e-3 && rd.osc_ratio <= 1e-3 &&
                      err_d <= 1e-2 && gap_d <= 1e-3;

  return {pass_c && pass_d,
          strf("order-1: residual %.2e, |u - sqrt2| %.2e, starts agree to "
               "%.2e; dual: residual %.2e, |u - 1| %.2e, starts agree to %.2e",
               rc.residual, err_c, gap_c, rd.residual, err_d, gap_d)};
}

// ---------------------------------------------------------------------------
// 6. entropy_monotone: along the conserving flow the entropy J never rises,
//    the conserved q-volume drifts by no more than the time-stepping error,
//    and that drift shrinks by ~4x when the grid (and with it dt) refines.
// ---------------------------------------------------------------------------

Outcome entropy_monotone() {
  auto run = [](int nt, int np) {
    FlowParams P;
    P.variant = FlowVariant::support_normalized_gauss;
    P.n = 2;
    P.n_theta = nt;
    P.n_phi = np;
    P.alpha = 0.0;
    P.delta = 0.0;
    P.beta = 2.0;
    P.curvature.kind = CurvatureKind::sigma_k_root;
    P.curvature.k = 2;
    P.curvature.argument = CurvatureArgument::principal_radii;
    P.psi.kind = PsiSpec::Kind::quadratic;
    P.psi.terms = {{{0.0, 0.0, 1.0}, 0.1}};
    P.initial.kind = ShapeSpec::Kind::ellipsoid;
    P.initial.semi_axes = {1.0, 1.0, 1.3};
    P.stop.residual_tol = 5e-4;
    P.time.record_every = 1;
    return run_flow(P);
  };
  const FlowResult A = run(48, 96);
  const FlowResult B = run(96, 192);
  if (A.verdict != FlowVerdict::converged ||
      B.verdict != FlowVerdict::converged)
    return {false, strf("expected convergence on both grids, got %s / %s",
                        to_string(A.verdict), to_string(B.verdict))};

  auto vq_drift = [](const FlowResult& R) {
    const double v0 = R.history.front().v_q;
    double d = 0.0;
    for (const FlowRecord& r : R.history)
      d = std::max(d, std::abs(r.v_q - v0));
    return d / std::abs(v0);
  };
  const double drift_a = vq_drift(A);
  const double drift_b = vq_drift(B);
  const double ratio =
      drift_b > 0.0 ? drift_a / drift_b : std::numeric_limits<double>::infinity();

  double worst_rise = 0.0;
  for (std::size_t i = 1; i < A.history.size(); ++i) {
    const double rise = A.history[i].j_pq - A.history[i - 1].j_pq;
    const double slack = 1e-8 * (1.0 + std::abs(A.history[i].j_pq));
    worst_rise = std::max(worst_rise, rise - slack);
  }

  // The limit must be stationary: phi psi u^{alpha-1} rho^delta
  // (det A)^{beta/n} constant over the sphere.
  PsiSpec psi;
  psi.kind = PsiSpec::Kind::quadratic;
  psi.terms = {{{0.0, 0.0, 1.0}, 0.1}};
  FunctionalContext fc;
  fc.init(A.grid, psi, 2.0);
  SupportGeometry sg;
  sg.build(A.grid, A.field);
  const double gap = stationarity_gap(fc, sg, 0.0, 0.0, 2.0, A.phi_final);

  const bool pass = worst_rise <= 0.0 && drift_a <= 1e-3 && ratio >= 3.0 &&
                    gap <= 1e-2;
  return {pass, strf("entropy rise above slack %.1e; volume drift %.2e -> "
                     "%.2e (ratio %.2f); stationarity gap %.2e",
                     worst_rise, drift_a, drift_b, ratio, gap)};
}

// ---------------------------------------------------------------------------
// 7. barrier_monotone: with an admissible anisotropy, once the speed ratio
//    starts above the threshold eta its envelope is trapped -- the running
//    max never increases and the running min never decreases.
// ---------------------------------------------------------------------------

Outcome barrier_monotone() {
  PsiSpec psi;
  psi.kind = PsiSpec::Kind::quadratic;
  psi.terms = {{{0.0, 0.0, 1.0}, 0.05}};

  // The structural condition on the weight must hold for this regime.
  const Grid g = Grid::make(2, 48, 96);
  const PsiConditionReport rep = check_psi_condition(g, psi, -1.0, 1.0);
  if (!rep.positive_definite)
    return {false, strf("anisotropy condition violated (min eigenvalue %.3e)",
                        rep.min_eig)};

  FlowParams P;
  P.variant = FlowVariant::support_normalized_sigma_k;
  P.n = 2;
  P.n_theta = 48;
  P.n_phi = 96;
  P.alpha = -1.0;
  P.delta = -0.5;
  P.beta = 1.0;
  P.curvature.kind = CurvatureKind::sigma_k_root;
  P.curvature.k = 1;
  P.curvature.argument = CurvatureArgument::principal_radii;
  P.psi = psi;
  P.initial.kind = ShapeSpec::Kind::ellipsoid;
  P.initial.semi_axes = {1.0, 1.0, 1.2};
  P.time.max_steps = 2000;
  P.time.record_every = 1;
  const FlowResult R = run_flow(P);
  if (R.history.empty()) return {false, "no history recorded"};
  if (std::abs(R.eta - 2.0) > 1e-14)
    return {false, strf("unexpected eta %.15f", R.eta)};

  // prescale puts the initial ratio 5% above the threshold
  if (R.history.front().q_min < 1.0499 * R.eta)
    return {false, strf("initial ratio %.6f not above the threshold %.6f",
                        R.history.front().q_min, 1.05 * R.eta)};

  const double tol = 1e-6 * R.eta;
  double hi = std::max(R.history.front().q_max, R.eta);
  double lo = std::min(R.history.front().q_min, R.eta);
  bool mono = true;
  double worst = 0.0;
  for (std::size_t i = 1; i < R.history.size(); ++i) {
    const double nh = std::max(R.history[i].q_max, R.eta);
    const double nl = std::min(R.history[i].q_min, R.eta);
    worst = std::max({worst, nh - hi, lo - nl});
    if (nh > hi + tol || nl < lo - tol) mono = false;
    hi = std::min(hi, nh);
    lo = std::max(lo, nl);
  }
  return {mono, strf("ratio window [%.4f, %.4f] -> [%.4f, %.4f] around eta "
                     "%.1f, worst envelope violation %.2e over %zu rows",
                     R.history.front().q_min, R.history.front().q_max, lo, hi,
                     R.eta, worst, R.history.size())};
}

// ---------------------------------------------------------------------------
// 8. self_checks: stationary balls stay put to rounding under all normalized
//    variants; the curvature kernels agree with brute-force enumeration and
//    finite differences and satisfy the 1-homogeneity identity; the built-in
//    validation table is clean at both levels.
// ---------------------------------------------------------------------------

Outcome self_checks() {
  // (a) unit balls are fixed points of every normalized variant
  double worst_drift = 0.0;
  const FlowVariant variants[] = {FlowVariant::radial_normalized,
                                  FlowVariant::support_normalized_sigma_k,
                                  FlowVariant::support_normalized_gauss};
  for (FlowVariant v : variants) {
    FlowParams P;
    P.variant = v;
    P.n = 2;
    P.n_theta = 24;
    P.n_phi = 48;
    const bool gauss = v == FlowVariant::support_normalized_gauss;
    P.beta = gauss ? 2.0 : 1.0;
    P.curvature.kind = CurvatureKind::sigma_k_root;
    P.curvature.k = gauss ? 2 : 1;
    P.curvature.argument = is_radial(v) ? CurvatureArgument::principal_curvatures
                                        : CurvatureArgument::principal_radii;
    P.initial.kind = ShapeSpec::Kind::ball;
    P.initial.radius = 1.0;
    P.time.max_steps = 1000;
    P.time.record_every = 50;
    const FlowResult R = run_flow(P);
    for (const FlowRecord& r : R.history)
      worst_drift = std::max({worst_drift, std::abs(r.min_rho - 1.0),
                              std::abs(r.max_rho - 1.0)});
  }
  const bool pass_a = worst_drift <= 1e-6;

  // (b) sigma_k against brute-force subset enumeration
  testutil::Lcg rng;
  double worst_sigma = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const double l1 = rng.next_in(-2.0, 3.0);
    const double l2 = rng.next_in(-2.0, 3.0);
    worst_sigma = std::max(
        {worst_sigma,
         std::abs(sigma_k(2, 1, l1, l2) -
                  testutil::sigma_k_bruteforce({l1, l2}, 1)),
         std::abs(sigma_k(2, 2, l1, l2) -
                  testutil::sigma_k_bruteforce({l1, l2}, 2)),
         std::abs(sigma_k(1, 1, l1, l2) -
                  testutil::sigma_k_bruteforce({l1}, 1))});
  }
  const bool pass_b = worst_sigma <= 1e-12;

  // (c) analytic curvature gradients against finite differences, plus the
  //     1-homogeneity (Euler) identity
  std::vector<CurvatureSpec> fams;
  {
    CurvatureSpec s;
    s.kind = CurvatureKind::sigma_k_root;
    s.k = 1;
    fams.push_back(s);
    s.k = 2;
    fams.push_back(s);
    s.kind = CurvatureKind::quotient;
    s.k = 1;
    s.l = 2;
    fams.push_back(s);
    s.kind = CurvatureKind::power_mean;
    s.m = -1.0;
    fams.push_back(s);
    s.m = -2.5;
    fams.push_back(s);
  }
  double worst_grad = 0.0, worst_euler = 0.0;
  for (const CurvatureSpec& spec : fams)
    for (int trial = 0; trial < 20; ++trial) {
      const double l1 = rng.next_in(0.4, 2.5);
      const double l2 = rng.next_in(0.4, 2.5);
      const CurvatureEval ce = eval_curvature(spec, 2, l1, l2);
      const double fd1 = testutil::fd_derivative(
          [&](double x) { return eval_curvature(spec, 2, x, l2).f; }, l1,
          1e-3);
      const double fd2 = testutil::fd_derivative(
          [&](double x) { return eval_curvature(spec, 2, l1, x).f; }, l2,
          1e-3);
      worst_grad = std::max({worst_grad, std::abs(ce.df1 - fd1) / std::abs(fd1),
                             std::abs(ce.df2 - fd2) / std::abs(fd2)});
      worst_euler = std::max(
          worst_euler, std::abs(l1 * ce.df1 + l2 * ce.df2 - ce.f) / ce.f);
    }
  const bool pass_c = worst_grad <= 1e-7 && worst_euler <= 1e-10;

  // (d) the built-in validation sweep is clean at both levels
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<CheckResult> quick = run_validation(ValidateLevel::quick);
  const double quick_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  const std::vector<CheckResult> full = run_validation(ValidateLevel::full);
  const bool pass_d =
      all_passed(quick) && quick_s <= 10.0 && all_passed(full);

  const bool pass = pass_a && pass_b && pass_c && pass_d;
  return {pass, strf("ball drift %.1e; sigma_k gap %.1e; gradient gap %.1e, "
                     "homogeneity gap %.1e; validation %zu+%zu checks %s "
                     "(quick %.2f s)",
                     worst_drift, worst_sigma, worst_grad, worst_euler,
                     quick.size(), full.size(),
                     pass_d ? "clean" : "NOT clean", quick_s)};
}

// ---------------------------------------------------------------------------

struct Criterion {
  const char* name;
  Outcome (*fn)();
};

const Criterion kCriteria[] = {
    {"ball_expansion", ball_expansion},
    {"blow_up_fit", blow_up_fit},
    {"aniso_convergence", aniso_convergence},
    {"ellipsoid_rounding", ellipsoid_rounding},
    {"stationary_solve", stationary_solve},
    {"entropy_monotone", entropy_monotone},
    {"barrier_monotone", barrier_monotone},
    {"self_checks", self_checks},
};
constexpr int kCount = int(sizeof(kCriteria) / sizeof(kCriteria[0]));

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> wanted;
  if (argc <= 1) {
    for (int i = 1; i <= kCount; ++i) wanted.push_back(i);
  } else {
    for (int a = 1; a < argc; ++a) {
      const int idx = std::atoi(argv[a]);
      if (idx < 1 || idx > kCount) {
        std::fprintf(stderr,
                     "usage: %s [index ...]  (indices 1..%d; no arguments "
                     "runs everything)\n",
                     argv[0], kCount);
        return 2;
      }
      wanted.push_back(idx);
    }
  }

  bool all_pass = true;
  for (int idx : wanted) {
    const Criterion& c = kCriteria[idx - 1];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.fn();
    } catch (const std::exception& e) {
      out = {false, strf("exception: %s", e.what())};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    std::printf("[%s] %d %-18s %s  [%.1f s]\n", out.pass ? "PASS" : "FAIL",
                idx, c.name, out.detail.c_str(), secs);
    std::fflush(stdout);
    all_pass = all_pass && out.pass;
  }
  return all_pass ? 0 : 1;
}
