#include "curvflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "curvflow/errors.hpp"
#include "curvflow/exact.hpp"
#include "curvflow/functionals.hpp"
#include "curvflow/numeric.hpp"
#include "curvflow/parallel.hpp"

namespace curvflow {

bool is_radial(FlowVariant v) {
  return v == FlowVariant::radial_original ||
         v == FlowVariant::radial_normalized;
}

bool is_original(FlowVariant v) {
  return v == FlowVariant::radial_original ||
         v == FlowVariant::support_original;
}

const char* to_string(FlowVariant v) {
  switch (v) {
    case FlowVariant::radial_original: return "radial_original";
    case FlowVariant::radial_normalized: return "radial_normalized";
    case FlowVariant::support_original: return "support_original";
    case FlowVariant::support_normalized_sigma_k:
      return "support_normalized_sigma_k";
    case FlowVariant::support_normalized_gauss:
      return "support_normalized_gauss";
  }
  return "?";
}

const char* to_string(FlowVerdict v) {
  switch (v) {
    case FlowVerdict::converged: return "converged";
    case FlowVerdict::blown_up: return "blown_up";
    case FlowVerdict::reached_t_end: return "reached_t_end";
    case FlowVerdict::max_steps: return "max_steps";
  }
  return "?";
}

void FlowParams::validate() const {
  if (n != 1 && n != 2) throw ConfigError("n must be 1 or 2");
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw ConfigError("beta must be positive and finite");
  if (!std::isfinite(alpha) || !std::isfinite(delta))
    throw ConfigError("alpha and delta must be finite");
  curvature.validate(n);
  psi.validate(n);
  initial.validate(n);
  if (is_radial(variant)) {
    if (curvature.argument != CurvatureArgument::principal_curvatures)
      throw ConfigError(
          "radial variants evaluate the speed on principal curvatures");
    if (!psi.is_constant_one())
      throw ConfigError(
          "radial variants require psi == 1 (anisotropy needs the support "
          "representation)");
  } else {
    if (curvature.kind != CurvatureKind::sigma_k_root ||
        curvature.argument != CurvatureArgument::principal_radii)
      throw ConfigError(
          "support variants use sigma_k^{1/k} of the principal radii");
    if (variant == FlowVariant::support_normalized_gauss && curvature.k != n)
      throw ConfigError("the gauss-normalized variant needs k == n");
  }
  if (!(time.dt_safety > 0.0) || time.dt_safety > 1.0)
    throw ConfigError("dt_safety must lie in (0, 1]");
  if (time.dt_fixed < 0.0 || !std::isfinite(time.dt_fixed))
    throw ConfigError("dt_fixed must be finite and >= 0");
  if (!(time.t_end > 0.0)) throw ConfigError("t_end must be positive");
  if (time.max_steps < 1) throw ConfigError("max_steps must be >= 1");
  if (time.record_every < 1) throw ConfigError("record_every must be >= 1");
  if (stop.osc_tol < 0.0 || stop.residual_tol < 0.0)
    throw ConfigError("stopping tolerances must be >= 0");
  if (!(stop.blow_up_factor > 1.0))
    throw ConfigError("blow_up_factor must exceed 1");
}

namespace {

// diagnostics gathered on the first stage of every step
struct Stage {
  double min_rho = 0, max_rho = 0;
  double max_grad = 0, min_lambda = 0;
  double q_min = 0, q_max = 0;
  double max_coef = 0;
  double residual = 0;
  double phi = 1.0;
};

}  // namespace

namespace {

thread_local std::vector<FlowRecord> g_partial_history;

FlowResult run_flow_impl(const FlowParams& P,
                         const std::vector<double>* start,
                         const FlowObserver* obs) {
  P.validate();
  g_partial_history.clear();
  const bool radial = is_radial(P.variant);
  const bool original = is_original(P.variant);
  const bool gauss = P.variant == FlowVariant::support_normalized_gauss;
  const int n = P.n;
  const int k = radial ? 1 : P.curvature.k;

  FlowResult R;
  R.grid = Grid::make(n, P.n_theta, P.n_phi);
  const Grid& g = R.grid;
  const int sz = g.size();

  std::vector<double> field;
  if (start != nullptr) {
    if (int(start->size()) != sz)
      throw ConfigError("start field size does not match the grid");
    field = *start;
  } else if (radial) {
    P.initial.radial(g, field);
  } else {
    P.initial.support(g, field);
  }

  // value of the speed factor on the unit sphere, computed through the same
  // power path as the flow speed -- the unit sphere is then stationary for
  // the normalized variants to the last bit
  const double eta =
      radial ? eta_kappa(P.curvature, n, P.beta) : eta_lambda(n, k, P.beta);
  R.eta = eta;
  R.sigma = exact::sigma_total(P.alpha, P.delta, P.beta);
  R.p = p_exponent(n, P.alpha, P.beta);
  R.q = q_exponent(n, P.delta, P.beta);

  // rotationally symmetric data stays exactly ring-constant, so the phi
  // spacing never enters the stability bound
  const bool zonal = P.initial.is_zonal(n) && P.psi.is_zonal(n);
  const double h_min =
      zonal ? g.min_spacing_zonal() : g.min_spacing_pole_aware();

  FunctionalContext fc;
  if (!radial) fc.init(g, P.psi, P.beta);

  std::vector<double> rhs(sz), coef(sz), qratio(sz), mid(sz);
  RadialGeometry rgeo;
  SupportGeometry sgeo;
  const double bk = P.beta / double(k);

  // ---- right-hand sides -------------------------------------------------

  auto eval_radial = [&](const std::vector<double>& f) {
    rgeo.build(g, f);
    for (int i = 0; i < sz; ++i)
      if (!in_cone(P.curvature, n, rgeo.kappa1[i], rgeo.kappa2[i]))
        throw NumericalError("principal curvatures left the admissible cone "
                             "at node " +
                             std::to_string(i));
    par::for_each_node(sz, [&](int i) {
      const CurvatureEval ce =
          eval_curvature(P.curvature, n, rgeo.kappa1[i], rgeo.kappa2[i]);
      const double pu = pow_fast(rgeo.u[i], P.alpha);
      const double pr = pow_fast(f[i], P.delta);
      const double pf = pow_fast(ce.f, -P.beta);
      const double s = pu * pr * pf;  // psi == 1 on this side
      qratio[i] = s / rgeo.u[i];
      coef[i] = P.beta * (s / ce.f) * std::max(ce.df1, ce.df2) / f[i];
      const double sp = s * rgeo.omega[i];
      rhs[i] = original ? sp : sp - eta * f[i];
    });
  };

  double phi_now = 1.0;
  auto eval_support = [&](const std::vector<double>& f) {
    sgeo.build(g, f);
    for (int i = 0; i < sz; ++i)
      if (!in_cone(P.curvature, n, sgeo.lam1[i], sgeo.lam2[i]))
        throw NumericalError("principal radii left the sigma_" +
                             std::to_string(k) + " cone at node " +
                             std::to_string(i));
    const double phi =
        gauss ? phi_integral(fc, sgeo, P.alpha, P.delta, P.beta) : 1.0;
    phi_now = phi;
    par::for_each_node(sz, [&](int i) {
      const double u = f[i];
      const double pu = pow_fast(u, P.alpha);
      const double pr = pow_fast(sgeo.rho[i], P.delta);
      double sig;  // sigma_k(A) from the matrix invariants
      if (n == 1) sig = sgeo.a11[i];
      else if (k == 1) sig = sgeo.a11[i] + sgeo.a22[i];
      else sig = sgeo.det_a[i];
      const double ps = pow_fast(sig, bk);
      const double s = fc.psi[i] * pu * pr * ps;
      qratio[i] = s / u;
      const double dsig = (k == 1) ? 1.0 : std::max(sgeo.lam1[i], sgeo.lam2[i]);
      coef[i] = phi * fc.psi[i] * pu * pr * bk * (ps / sig) * dsig;
      if (original) rhs[i] = s;
      else if (gauss) rhs[i] = phi * s - u;
      else rhs[i] = s - eta * u;
    });
  };

  auto eval = [&](const std::vector<double>& f) {
    if (radial) eval_radial(f);
    else eval_support(f);
  };

  auto fill_stage = [&](const std::vector<double>& f, Stage& st) {
    const double inf = std::numeric_limits<double>::infinity();
    double mn = inf, mx = -inf, mg = 0, ml = inf, qmn = inf, qmx = -inf;
    double mc = 0, mr = 0, mf = 0;
    for (int i = 0; i < sz; ++i) {
      const double rho_i = radial ? f[i] : sgeo.rho[i];
      mn = std::min(mn, rho_i);
      mx = std::max(mx, rho_i);
      qmn = std::min(qmn, qratio[i]);
      qmx = std::max(qmx, qratio[i]);
      mc = std::max(mc, coef[i]);
      mr = std::max(mr, std::abs(rhs[i]));
      mf = std::max(mf, std::abs(f[i]));
      if (radial) {
        mg = std::max(mg, std::sqrt(rgeo.grad2[i]));
        ml = std::min(ml, rgeo.kappa1[i]);
      } else {
        const double g1 = sgeo.d.g1[i], g2 = sgeo.d.g2[i];
        mg = std::max(mg, std::sqrt(g1 * g1 + g2 * g2) / f[i]);
        ml = std::min(ml, sgeo.lam1[i]);
      }
    }
    st.min_rho = mn;
    st.max_rho = mx;
    st.max_grad = mg;
    st.min_lambda = ml;
    st.q_min = qmn;
    st.q_max = qmx;
    st.max_coef = mc;
    st.residual = mr / mf;
    st.phi = phi_now;
  };

  // conditioning pre-scale: start the speed ratio a little above eta so the
  // two-sided barrier traps it there from the first step on
  if (P.variant == FlowVariant::support_normalized_sigma_k && R.sigma < 1.0 &&
      P.prescale) {
    Stage st0;
    eval(field);
    fill_stage(field, st0);
    if (st0.q_min < 1.05 * eta) {
      const double s =
          pow_fast(1.05 * eta / st0.q_min, 1.0 / (R.sigma - 1.0));
      for (auto& v : field) v *= s;
    }
  }

  // ---- main loop ---------------------------------------------------------

  std::vector<FlowRecord>& hist = R.history;
  const long hist_cap = 10000;
  long stride = 1;
  double t = 0.0;
  long step = 0;
  Stage st;
  double dt = 0.0;
  double tau_now = 0.0;
  double phi_rec = 1.0;

  auto make_record = [&](const std::vector<double>& f) {
    FlowRecord r;
    r.step = step;
    r.t = t;
    r.tau = tau_now;
    r.dt = dt;
    r.min_rho = st.min_rho;
    r.max_rho = st.max_rho;
    r.max_grad_gamma = st.max_grad;
    r.min_lambda = st.min_lambda;
    r.eta = gauss ? 1.0 : eta;
    r.phi = phi_rec;
    r.q_min = st.q_min;
    r.q_max = st.q_max;
    if (radial) {
      r.u_p = u_p_value_radial(g, rgeo, R.p);
      r.v_q = v_q_value_radial(g, f, R.q);
    } else {
      r.u_p = u_p_value(fc, sgeo.u, R.p);
      r.v_q = v_q_value(fc, sgeo, R.q);
    }
    r.j_pq = r.u_p - r.v_q;
    r.residual = st.residual;
    return r;
  };

  long last_snapshot = -1;
  auto maybe_snapshot = [&](bool final_step) {
    if (obs == nullptr || obs->stride <= 0 || !obs->on_snapshot) return;
    if (!final_step && step % obs->stride != 0) return;
    if (step == last_snapshot) return;
    obs->on_snapshot(step, t, g, field);
    last_snapshot = step;
  };

  try {
  while (true) {
    try {
      eval(field);
    } catch (const NumericalError& e) {
      throw NumericalError("step " + std::to_string(step) +
                           ", t=" + std::to_string(t) + ": " + e.what());
    }
    fill_stage(field, st);
    if (step == 0) {
      R.initial_min_rho = st.min_rho;
      R.initial_max_rho = st.max_rho;
    }

    bool lands_on_end = false;
    if (P.time.dt_fixed > 0.0) {
      dt = P.time.dt_fixed;
    } else {
      if (!(st.max_coef > 0.0) || !std::isfinite(st.max_coef))
        throw NumericalError("degenerate diffusion coefficient at step " +
                             std::to_string(step));
      dt = P.time.dt_safety * h_min * h_min / (n * st.max_coef);
    }
    if (std::isfinite(P.time.t_end) && t + dt >= P.time.t_end) {
      dt = P.time.t_end - t;
      lands_on_end = true;
    }
    if (!lands_on_end && dt <= 1e-12 * std::max(1.0, t))
      throw NumericalError("time step underflow at step " +
                           std::to_string(step) + " (dt=" +
                           std::to_string(dt) + ", t=" + std::to_string(t) +
                           ")");

    tau_now = original ? exact::tau_of_t(t, eta, R.sigma) : t;
    phi_rec = gauss ? phi_now
                    : (original ? exact::phi_schedule(t, eta, R.sigma) : 1.0);

    if (step % (long(P.time.record_every) * stride) == 0) {
      hist.push_back(make_record(field));
      if (long(hist.size()) >= hist_cap) {
        // halve the history in place, doubling the cadence
        std::vector<FlowRecord> kept;
        kept.reserve(hist.size() / 2 + 1);
        for (size_t j = 0; j < hist.size(); j += 2) kept.push_back(hist[j]);
        hist.swap(kept);
        stride *= 2;
      }
    }
    maybe_snapshot(false);

    FlowVerdict verdict;
    bool done = true;
    if (original &&
        st.min_rho > P.stop.blow_up_factor * R.initial_max_rho) {
      verdict = FlowVerdict::blown_up;
    } else if (P.stop.osc_tol > 0.0 &&
               st.max_rho - st.min_rho <= P.stop.osc_tol) {
      verdict = FlowVerdict::converged;
    } else if (P.stop.residual_tol > 0.0 &&
               st.residual <= P.stop.residual_tol) {
      verdict = FlowVerdict::converged;
    } else if (std::isfinite(P.time.t_end) && t >= P.time.t_end) {
      verdict = FlowVerdict::reached_t_end;
    } else if (step >= P.time.max_steps) {
      verdict = FlowVerdict::max_steps;
    } else {
      done = false;
      verdict = FlowVerdict::max_steps;
    }
    if (done) {
      if (hist.empty() || hist.back().step != step)
        hist.push_back(make_record(field));
      maybe_snapshot(true);
      R.verdict = verdict;
      break;
    }

    // explicit midpoint: rhs holds the stage-1 slope, then the midpoint slope
    par::for_each_node(sz, [&](int i) { mid[i] = field[i] + 0.5 * dt * rhs[i]; });
    try {
      eval(mid);
    } catch (const NumericalError& e) {
      throw NumericalError("midpoint of step " + std::to_string(step) +
                           ", t=" + std::to_string(t) + ": " + e.what());
    }
    par::for_each_node(sz, [&](int i) { field[i] += dt * rhs[i]; });
    if (P.symmetrize) {
      par::for_each_node(sz, [&](int i) {
        mid[i] = 0.5 * (field[i] + field[g.antipode[i]]);
      });
      field.swap(mid);
    }
    t = lands_on_end ? P.time.t_end : t + dt;
    ++step;
  }
  } catch (const NumericalError&) {
    g_partial_history = hist;
    throw;
  }

  R.field = std::move(field);
  R.steps = step;
  R.t_final = t;
  R.tau_final = tau_now;
  R.phi_final = phi_rec;
  return R;
}

}  // namespace

FlowResult run_flow(const FlowParams& params) {
  return run_flow_impl(params, nullptr, nullptr);
}

FlowResult run_flow(const FlowParams& params, const FlowObserver& observer) {
  return run_flow_impl(params, nullptr, &observer);
}

const std::vector<FlowRecord>& last_partial_history() {
  return g_partial_history;
}

FlowResult run_flow(const FlowParams& params,
                    const std::vector<double>& start_field) {
  return run_flow_impl(params, &start_field, nullptr);
}

double estimate_blow_up_time(const FlowResult& R, double lo_factor,
                             double hi_factor) {
  if (!(R.sigma > 1.0))
    throw ConfigError("blow-up fit needs alpha + delta + beta > 1");
  const double base = R.initial_max_rho;
  std::vector<double> ts, ys;
  for (const FlowRecord& r : R.history) {
    if (r.min_rho >= lo_factor * base && r.min_rho <= hi_factor * base) {
      ts.push_back(r.t);
      ys.push_back(pow_fast(r.min_rho, 1.0 - R.sigma));
    }
  }
  if (ts.size() < 2)
    throw NumericalError("blow-up window holds fewer than two history rows");
  const LinearFit fit = linear_fit(ts, ys);
  if (!(fit.slope < 0.0))
    throw NumericalError("blow-up fit slope is not negative");
  return -fit.intercept / fit.slope;
}

}  // namespace curvflow
