#include "doctest.h"

#include <cmath>
#include <vector>

#include "curvflow/errors.hpp"
#include "curvflow/exact.hpp"
#include "curvflow/flow.hpp"
#include "curvflow/numeric.hpp"

// Flow engine: exact stationary states, closed-form ball evolution, blow-up
// detection, the two monotone structures (energy and speed-ratio barrier),
// history bookkeeping and the failure paths.

using namespace curvflow;

namespace {

FlowParams base_params(FlowVariant v, int n) {
  FlowParams P;
  P.variant = v;
  P.n = n;
  P.n_theta = n == 1 ? 64 : 16;
  P.n_phi = 32;
  P.beta = 1.0;
  P.curvature.kind = CurvatureKind::sigma_k_root;
  P.curvature.k = 1;
  P.curvature.argument = is_radial(v) ? CurvatureArgument::principal_curvatures
                                      : CurvatureArgument::principal_radii;
  P.initial.kind = ShapeSpec::Kind::ball;
  P.initial.radius = 1.0;
  return P;
}

}  // namespace

TEST_SUITE("flow") {

TEST_CASE("unit sphere is bitwise stationary for the normalized variants") {
  for (int n : {1, 2})
    for (FlowVariant v : {FlowVariant::radial_normalized,
                          FlowVariant::support_normalized_sigma_k,
                          FlowVariant::support_normalized_gauss}) {
      FlowParams P = base_params(v, n);
      if (v == FlowVariant::support_normalized_gauss) {
        P.curvature.k = n;
        P.beta = double(n);
      }
      P.time.max_steps = 300;
      P.time.record_every = 100;
      const FlowResult R = run_flow(P);
      for (double x : R.field) REQUIRE(x == 1.0);
      for (const FlowRecord& r : R.history) {
        REQUIRE(r.min_rho == 1.0);
        REQUIRE(r.max_rho == 1.0);
      }
    }
}

TEST_CASE("expanding ball follows the closed-form radius") {
  // radial side: d rho/dt = rho^0 * f(kappa)^{-1} * 1, sigma = 1
  FlowParams P = base_params(FlowVariant::radial_original, 2);
  P.curvature.k = 2;  // f = sqrt(sigma_2), eta = 1
  P.time.dt_fixed = 1e-3;
  P.time.t_end = 0.25;
  FlowResult R = run_flow(P);
  REQUIRE(R.verdict == FlowVerdict::reached_t_end);
  REQUIRE(R.eta == 1.0);
  const double want = std::exp(0.25);
  for (double x : R.field)
    REQUIRE(x == doctest::Approx(want).epsilon(1e-6));
  // the recorded schedule phi matches the closed form as well
  const FlowRecord& last = R.history.back();
  REQUIRE(last.phi ==
          doctest::Approx(exact::phi_schedule(0.25, 1.0, 1.0)).epsilon(1e-12));

  // support side: d u/dt = sigma_2(A), sigma = 2, r(t) = 1/(1 - t)
  FlowParams Q = base_params(FlowVariant::support_original, 2);
  Q.beta = 2.0;
  Q.curvature.k = 2;
  Q.time.dt_fixed = 2e-4;
  Q.time.t_end = 0.5;
  Q.stop.blow_up_factor = 1e6;
  R = run_flow(Q);
  REQUIRE(R.verdict == FlowVerdict::reached_t_end);
  for (double x : R.field) REQUIRE(x == doctest::Approx(2.0).epsilon(1e-5));
}

TEST_CASE("time step halving cuts the integration error by about four") {
  FlowParams P = base_params(FlowVariant::radial_original, 1);
  P.time.t_end = 0.5;
  const double want = std::exp(0.5);
  double err[2];
  int which = 0;
  for (double dt : {4e-3, 2e-3}) {
    P.time.dt_fixed = dt;
    const FlowResult R = run_flow(P);
    err[which++] = std::abs(R.field[0] - want);
  }
  REQUIRE(err[0] / err[1] > 3.5);
  REQUIRE(err[0] / err[1] < 4.5);
}

TEST_CASE("finite-time blow-up is detected and its time estimated") {
  FlowParams P = base_params(FlowVariant::support_original, 1);
  P.beta = 2.0;  // sigma = 2, eta = 1: T* = 1
  P.stop.blow_up_factor = 150.0;
  P.time.max_steps = 200000;
  const FlowResult R = run_flow(P);
  REQUIRE(R.verdict == FlowVerdict::blown_up);
  const double t_star = estimate_blow_up_time(R, 10.0, 100.0);
  REQUIRE(t_star == doctest::Approx(1.0).epsilon(0.02));
  // a window the run never reached is an error
  REQUIRE_THROWS_AS(estimate_blow_up_time(R, 500.0, 1000.0), NumericalError);
}

TEST_CASE("perturbations of the sphere decay under the normalized flow") {
  FlowParams P = base_params(FlowVariant::radial_normalized, 1);
  P.alpha = -1.0;
  P.initial.kind = ShapeSpec::Kind::zonal_mode;
  P.initial.mode = 3;
  // r = 1 + c cos(m theta) is convex only for c < 1/(1+m^2) = 0.1; stay
  // inside the curvature cone with some margin
  P.initial.c = 0.08;
  P.stop.osc_tol = 1e-4;
  P.time.max_steps = 200000;
  const FlowResult R = run_flow(P);
  REQUIRE(R.verdict == FlowVerdict::converged);
  const FlowRecord& last = R.history.back();
  REQUIRE(last.max_rho - last.min_rho <= 1e-4);

  // log of the squared gradient falls linearly over the trailing half
  std::vector<double> ts, ys;
  for (const FlowRecord& r : R.history)
    if (r.t >= 0.5 * R.t_final && r.max_grad_gamma > 0.0) {
      ts.push_back(r.t);
      ys.push_back(2.0 * std::log(r.max_grad_gamma));
    }
  REQUIRE(ts.size() >= 3);
  const LinearFit fit = linear_fit(ts, ys);
  REQUIRE(fit.slope < 0.0);
  REQUIRE(fit.r2 > 0.99);
}

TEST_CASE("conserving variant: energy falls, conserved integral stays") {
  FlowParams P = base_params(FlowVariant::support_normalized_gauss, 2);
  P.n_theta = 32;
  P.n_phi = 64;
  P.beta = 2.0;
  P.curvature.k = 2;
  P.psi.kind = PsiSpec::Kind::quadratic;
  P.psi.terms.push_back({{0.0, 0.0, 1.0}, 0.1});
  P.initial.kind = ShapeSpec::Kind::ellipsoid;
  P.initial.semi_axes = {1.0, 1.0, 1.25};
  P.time.max_steps = 400;
  P.time.record_every = 1;
  const FlowResult R = run_flow(P);
  REQUIRE(int(R.history.size()) == 401);
  const double v0 = R.history.front().v_q;
  double worst_rise = 0.0, worst_drift = 0.0;
  for (std::size_t i = 1; i < R.history.size(); ++i) {
    const double jump = R.history[i].j_pq - R.history[i - 1].j_pq;
    worst_rise = std::max(
        worst_rise, jump / (1.0 + std::abs(R.history[i - 1].j_pq)));
    worst_drift =
        std::max(worst_drift, std::abs(R.history[i].v_q - v0) / std::abs(v0));
  }
  REQUIRE(worst_rise <= 1e-8);
  REQUIRE(worst_drift <= 1e-3);
}

TEST_CASE("speed-ratio barrier: extrema trapped one-sided around eta") {
  FlowParams P = base_params(FlowVariant::support_normalized_sigma_k, 2);
  P.n_theta = 32;
  P.n_phi = 64;
  P.alpha = -1.0;
  P.delta = -0.5;
  P.beta = 1.0;  // sigma = -0.5 < 1, eta = 2
  P.psi.kind = PsiSpec::Kind::quadratic;
  P.psi.terms.push_back({{0.0, 0.0, 1.0}, 0.05});
  P.initial.kind = ShapeSpec::Kind::ellipsoid;
  P.initial.semi_axes = {1.0, 1.0, 1.2};
  P.time.max_steps = 500;
  P.time.record_every = 1;
  const FlowResult R = run_flow(P);
  REQUIRE(R.eta == doctest::Approx(2.0));
  // prescale pushed the initial ratio above eta
  REQUIRE(R.history.front().q_min >= 1.049 * R.eta);
  double hi = std::max(R.history.front().q_max, R.eta);
  double lo = std::min(R.history.front().q_min, R.eta);
  for (const FlowRecord& r : R.history) {
    const double new_hi = std::max(r.q_max, R.eta);
    const double new_lo = std::min(r.q_min, R.eta);
    REQUIRE(new_hi <= hi + 1e-6 * R.eta);
    REQUIRE(new_lo >= lo - 1e-6 * R.eta);
    hi = std::min(hi, new_hi);
    lo = std::max(lo, new_lo);
  }
}

TEST_CASE("prescale can be turned off") {
  FlowParams P = base_params(FlowVariant::support_normalized_sigma_k, 2);
  P.alpha = -1.0;
  P.delta = -0.5;
  P.initial.kind = ShapeSpec::Kind::ball;
  // Q(r) = 2 r^{-1/2} on a ball, eta = 2, so radius 4 starts at Q = 1
  P.initial.radius = 4.0;
  P.time.max_steps = 1;
  P.time.record_every = 1;
  P.prescale = false;
  FlowResult R = run_flow(P);
  REQUIRE(R.history.front().q_min < R.eta);
  P.prescale = true;
  R = run_flow(P);
  REQUIRE(R.history.front().q_min >= 1.049 * R.eta);
}

TEST_CASE("symmetrize keeps the field exactly even") {
  FlowParams P = base_params(FlowVariant::support_normalized_gauss, 2);
  P.beta = 2.0;
  P.curvature.k = 2;
  P.initial.kind = ShapeSpec::Kind::offset_ball;
  P.initial.radius = 1.0;
  P.initial.center = {0.1, 0.05, 0.2};  // odd part in the start datum
  P.symmetrize = true;
  P.time.max_steps = 50;
  const FlowResult R = run_flow(P);
  for (int i = 0; i < R.grid.size(); ++i)
    REQUIRE(R.field[i] == R.field[R.grid.antipode[i]]);
}

TEST_CASE("history is capped by thinning, never by dropping the tail") {
  FlowParams P = base_params(FlowVariant::radial_normalized, 1);
  P.initial.kind = ShapeSpec::Kind::zonal_mode;
  P.initial.c = 0.05;
  P.time.max_steps = 25000;
  P.time.record_every = 1;
  const FlowResult R = run_flow(P);
  REQUIRE(R.steps == 25000);
  REQUIRE(long(R.history.size()) <= 10000);
  REQUIRE(R.history.front().step == 0);
  REQUIRE(R.history.back().step == 25000);
  long prev = -1;
  for (const FlowRecord& r : R.history) {
    REQUIRE(r.step > prev);
    prev = r.step;
  }
}

TEST_CASE("t_end is landed on exactly") {
  FlowParams P = base_params(FlowVariant::radial_original, 1);
  P.time.dt_fixed = 0.003;  // does not divide t_end
  P.time.t_end = 0.1;
  const FlowResult R = run_flow(P);
  REQUIRE(R.verdict == FlowVerdict::reached_t_end);
  REQUIRE(R.t_final == 0.1);
}

TEST_CASE("observer snapshots fire on the stride and at the end") {
  FlowParams P = base_params(FlowVariant::radial_original, 1);
  P.time.dt_fixed = 1e-3;
  P.time.t_end = 0.05;  // 50 steps
  FlowObserver obs;
  obs.stride = 20;
  std::vector<long> seen;
  obs.on_snapshot = [&](long step, double, const Grid&,
                        const std::vector<double>& field) {
    REQUIRE(field.size() == std::size_t(64));
    seen.push_back(step);
  };
  run_flow(P, obs);
  REQUIRE(seen == std::vector<long>{0, 20, 40, 50});
}

TEST_CASE("resuming from a final field continues the decay") {
  FlowParams P = base_params(FlowVariant::radial_normalized, 1);
  P.initial.kind = ShapeSpec::Kind::zonal_mode;
  P.initial.c = 0.2;
  P.time.max_steps = 400;
  const FlowResult first = run_flow(P);
  const double osc1 =
      first.history.back().max_rho - first.history.back().min_rho;
  const FlowResult second = run_flow(P, first.field);
  const double osc2 =
      second.history.back().max_rho - second.history.back().min_rho;
  REQUIRE(osc2 < osc1);
  REQUIRE_THROWS_AS(run_flow(P, std::vector<double>(5, 1.0)), ConfigError);
}

TEST_CASE("step underflow fails loudly and leaves the partial trail") {
  FlowParams P = base_params(FlowVariant::radial_original, 1);
  P.time.dt_fixed = 1e-13;
  P.time.t_end = 1.0;
  REQUIRE_THROWS_AS(run_flow(P), NumericalError);
  // died before the first record: trail is empty but well-defined
  REQUIRE(last_partial_history().empty());

  // a mid-run failure keeps what was recorded
  FlowParams Q = base_params(FlowVariant::support_normalized_sigma_k, 2);
  Q.initial.kind = ShapeSpec::Kind::ellipsoid;
  Q.initial.semi_axes = {1.0, 1.0, 1.6};
  Q.time.dt_fixed = 0.3;  // way past the stability bound
  Q.time.max_steps = 500;
  Q.time.record_every = 1;
  REQUIRE_THROWS_AS(run_flow(Q), NumericalError);
  REQUIRE_FALSE(last_partial_history().empty());
  REQUIRE(last_partial_history().front().step == 0);
}

TEST_CASE("parameter validation rejects inconsistent requests") {
  // radial variants evaluate f on principal curvatures with psi == 1
  FlowParams P = base_params(FlowVariant::radial_normalized, 2);
  P.psi.kind = PsiSpec::Kind::linear;
  P.psi.c = 0.2;
  REQUIRE_THROWS_AS(P.validate(), ConfigError);
  P = base_params(FlowVariant::radial_normalized, 2);
  P.curvature.argument = CurvatureArgument::principal_radii;
  REQUIRE_THROWS_AS(P.validate(), ConfigError);
  // support variants are sigma_k flows on principal radii
  P = base_params(FlowVariant::support_original, 2);
  P.curvature.kind = CurvatureKind::power_mean;
  REQUIRE_THROWS_AS(P.validate(), ConfigError);
  // the conserving variant is a full Gauss-curvature flow
  P = base_params(FlowVariant::support_normalized_gauss, 2);
  P.curvature.k = 1;
  REQUIRE_THROWS_AS(P.validate(), ConfigError);
  // time controls
  P = base_params(FlowVariant::radial_original, 1);
  P.time.dt_safety = 1.5;
  REQUIRE_THROWS_AS(P.validate(), ConfigError);
  P = base_params(FlowVariant::radial_original, 1);
  P.time.t_end = -1.0;
  REQUIRE_THROWS_AS(P.validate(), ConfigError);
  P = base_params(FlowVariant::radial_original, 1);
  P.stop.blow_up_factor = 0.5;
  REQUIRE_THROWS_AS(P.validate(), ConfigError);
}

TEST_CASE("exponent labels and eta recorded on the result") {
  FlowParams P = base_params(FlowVariant::support_normalized_sigma_k, 2);
  P.alpha = -0.5;
  P.beta = 0.5;
  const FlowResult R = run_flow(P);
  REQUIRE(R.eta == doctest::Approx(std::sqrt(2.0)));  // binom(2,1)^{1/2}
  REQUIRE(R.sigma == doctest::Approx(0.0));
  REQUIRE(R.p == doctest::Approx(1.0 + 2.0 * 1.5 / 0.5));
  REQUIRE(R.q == doctest::Approx(3.0));
}

}  // TEST_SUITE
