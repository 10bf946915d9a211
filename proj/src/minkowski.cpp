#include "curvflow/minkowski.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "curvflow/curvature.hpp"
#include "curvflow/errors.hpp"
#include "curvflow/exact.hpp"
#include "curvflow/functionals.hpp"
#include "curvflow/numeric.hpp"
#include "curvflow/parallel.hpp"

namespace curvflow {

const char* to_string(EquationKind e) {
  switch (e) {
    case EquationKind::lp_minkowski: return "lp_minkowski";
    case EquationKind::lp_cm: return "lp_cm";
    case EquationKind::lp_dual_minkowski: return "lp_dual_minkowski";
    case EquationKind::lp_dual_cm: return "lp_dual_cm";
    case EquationKind::soliton: return "soliton";
  }
  return "?";
}

bool MinkowskiProblem::is_dual() const {
  return equation == EquationKind::lp_dual_minkowski ||
         equation == EquationKind::lp_dual_cm;
}

double MinkowskiProblem::q_effective() const {
  return is_dual() ? q : double(k + 1);
}

void MinkowskiProblem::validate() const {
  if (n != 1 && n != 2) throw ConfigError("problem: n must be 1 or 2");
  psi.validate(n);
  const bool det_kind = equation == EquationKind::lp_minkowski ||
                        equation == EquationKind::lp_dual_minkowski;
  if (det_kind) {
    if (k != n) throw ConfigError("problem: the det-A equations have k = n");
  } else if (equation == EquationKind::soliton) {
    if (k < 1 || k > n) throw ConfigError("problem: k must lie in [1, n]");
  } else {
    if (k < 1 || k > n - 1)
      throw ConfigError("problem: sigma_k equations need 1 <= k <= n-1");
  }
  if (equation == EquationKind::soliton) {
    if (!std::isfinite(alpha) || !std::isfinite(delta))
      throw ConfigError("problem: alpha and delta must be finite");
    if (!(beta > 0.0) || !std::isfinite(beta))
      throw ConfigError("problem: soliton beta must be positive");
  } else {
    if (!std::isfinite(p)) throw ConfigError("problem: p must be finite");
    if (is_dual() && !std::isfinite(q))
      throw ConfigError("problem: q must be finite");
    if (beta != 0.0 && (!(beta > 0.0) || !std::isfinite(beta)))
      throw ConfigError("problem: beta must be positive (or 0 for default n)");
  }
}

namespace {

// sigma_k(A) from the cached matrix invariants
double sigma_k_of(const SupportGeometry& sg, int n, int k, int i) {
  if (n == 1) return sg.a11[i];
  if (k == 1) return sg.a11[i] + sg.a22[i];
  return sg.det_a[i];
}

void require_all_positive(const std::vector<double>& v, const char* what) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i]) || !(v[i] > 0.0))
      throw NumericalError(std::string(what) + " not positive/finite at node " +
                           std::to_string(i) + " (value " +
                           std::to_string(v[i]) + ")");
}

}  // namespace

ResidualField residual(const Grid& g, const SupportGeometry& sg,
                       const MinkowskiProblem& prob, double c0) {
  const int sz = g.size();
  const int n = prob.n, k = prob.k;
  ResidualField out;
  out.pointwise.resize(sz);

  if (prob.equation == EquationKind::soliton) {
    const double eta = eta_lambda(n, k, prob.beta);
    const double target = c0 * eta;
    const double bk = prob.beta / double(k);
    std::vector<double> psi_v;
    prob.psi.evaluate(g, psi_v);
    par::for_each_node(sz, [&](int i) {
      const double s = sigma_k_of(sg, n, k, i);
      const double q_i = psi_v[i] * pow_fast(sg.u[i], prob.alpha) / sg.u[i] *
                         pow_fast(sg.rho[i], prob.delta) * pow_fast(s, bk);
      out.pointwise[i] = q_i - target;
    });
    double sup = 0.0;
    for (int i = 0; i < sz; ++i)
      sup = std::max(sup, std::abs(out.pointwise[i]));
    out.sup_rel = sup / target;
    return out;
  }

  const double re = double(k) + 1.0 - prob.q_effective();  // rho exponent
  const double pe = prob.p - 1.0;                          // u exponent
  std::vector<double> psi_v, rhs(sz);
  prob.psi.evaluate(g, psi_v);
  par::for_each_node(sz, [&](int i) {
    rhs[i] =
        c0 * pow_fast(sg.rho[i], re) * pow_fast(sg.u[i], pe) * psi_v[i];
    out.pointwise[i] = sigma_k_of(sg, n, k, i) - rhs[i];
  });
  require_all_positive(rhs, "equation right-hand side");
  double sup = 0.0;
  for (int i = 0; i < sz; ++i)
    sup = std::max(sup, std::abs(out.pointwise[i]) / rhs[i]);
  out.sup_rel = sup;
  return out;
}

double soliton_residual(const Grid& g, const SupportGeometry& sg,
                        const PsiSpec& psi, double alpha, double delta,
                        double beta, int k, double eta) {
  const int sz = g.size();
  const double bk = beta / double(k);
  std::vector<double> psi_v, qv(sz);
  psi.evaluate(g, psi_v);
  par::for_each_node(sz, [&](int i) {
    const double s = sigma_k_of(sg, g.n, k, i);
    qv[i] = psi_v[i] * pow_fast(sg.u[i], alpha) / sg.u[i] *
            pow_fast(sg.rho[i], delta) * pow_fast(s, bk);
  });
  double sup = 0.0;
  for (int i = 0; i < sz; ++i) sup = std::max(sup, std::abs(qv[i] - eta));
  return sup / eta;
}

MinkowskiResult solve_minkowski(const MinkowskiProblem& prob,
                                const SolveOptions& opt) {
  const auto clock0 = std::chrono::steady_clock::now();
  prob.validate();
  const int n = prob.n, k = prob.k;
  const bool kn = (k == n);
  const bool soliton = prob.equation == EquationKind::soliton;

  MinkowskiResult res;

  // Flow exponents and the dictionary labels (n-based p, q).
  double alpha, delta, beta_flow, p_label, q_label;
  if (soliton) {
    alpha = prob.alpha;
    delta = prob.delta;
    beta_flow = prob.beta;
    const double beta_label = beta_flow * double(n) / double(k);
    p_label = p_exponent(n, alpha, beta_label);
    q_label = q_exponent(n, delta, beta_label);
  } else {
    const double beta_label = prob.beta > 0.0 ? prob.beta : double(n);
    beta_flow = beta_label * double(k) / double(n);
    p_label = prob.p;
    q_label = prob.q_effective() + double(n - k);
    alpha = alpha_from_p(n, p_label, beta_label);
    delta = delta_from_q(n, q_label, beta_label);
  }
  const double sigma = exact::sigma_total(alpha, delta, beta_flow);
  const double eta = eta_lambda(n, k, beta_flow);

  Grid g = Grid::make(n, opt.n_theta, opt.n_phi);
  // The target equation sigma_k = rho^{k+1-q} u^{p-1} psi is driven by a flow
  // with weight psi^{-beta_flow/k}; the soliton kind hands the flow its
  // weight directly.
  const PsiSpec psi_flow =
      soliton ? prob.psi : prob.psi.raised(-beta_flow / double(k));
  bool symmetrize = false;

  if (!kn) {
    if (!(sigma < 1.0))
      throw RegimeError(
          "sigma_k problems with k < n need alpha + delta + beta < 1 "
          "(equivalently p > q); got alpha + delta + beta = " +
          std::to_string(sigma) +
          (sigma == 1.0 ? " -- the scale-invariant combination leaves no "
                          "dilation freedom to pin the constant"
                        : ""));
    if (alpha <= 0.0) {
      const PsiConditionReport rep =
          check_psi_condition(g, psi_flow, alpha, beta_flow);
      if (!rep.positive_definite)
        throw RegimeError(
            "anisotropy condition failed: Hess g + g I with g = "
            "psi^{1/(1+beta-alpha)} must be positive definite for alpha <= 0 "
            "(min eigenvalue " +
            std::to_string(rep.min_eig) + ")");
      res.regime =
          "sigma_k barrier, alpha <= 0, anisotropy condition positive "
          "definite";
    } else if (alpha > 1.0 + beta_flow) {
      const PsiConditionReport rep =
          check_psi_condition(g, psi_flow, alpha, beta_flow);
      if (!rep.negative_definite)
        throw RegimeError(
            "anisotropy condition failed: Hess g + g I with g = "
            "psi^{1/(1+beta-alpha)} must be negative definite for alpha > "
            "1+beta (max eigenvalue " +
            std::to_string(rep.max_eig) + ")");
      res.regime =
          "sigma_k barrier, alpha > 1 + beta, anisotropy condition negative "
          "definite";
    } else {
      throw RegimeError(
          "alpha in (0, 1 + beta] is outside the admissible ranges for "
          "k < n; got alpha = " +
          std::to_string(alpha));
    }
  } else {
    if (p_label > q_label) {
      res.regime = "gauss, p > q";
    } else if (p_label == q_label) {
      if (p_label == 0.0)
        throw RegimeError(
            "p = q = 0 needs measure-normalized data and is outside the "
            "implemented regimes");
      res.regime = "gauss, p = q != 0 (solution unique up to dilation)";
    } else {
      if (!prob.psi.is_even())
        throw RegimeError(
            "p < q is admissible only for even anisotropy (origin-symmetric "
            "data)");
      bool range_ok = (p_label >= 0.0) || (q_label <= 0.0);
      if (!range_ok) {
        const double qs = q_star(n, q_label);  // q > 0 and p < 0 here
        range_ok = p_label > -qs;
      }
      if (!range_ok)
        throw RegimeError(
            "p < q needs p >= 0, or q <= 0, or -q* < p < 0; got p = " +
            std::to_string(p_label) + ", q* = " +
            std::to_string(q_star(n, q_label)));
      res.regime = "gauss, p < q, even data (subsequential)";
      res.subsequential = true;
      symmetrize = true;
    }
  }

  FlowParams P;
  P.variant = kn ? FlowVariant::support_normalized_gauss
                 : FlowVariant::support_normalized_sigma_k;
  P.n = n;
  P.n_theta = opt.n_theta;
  P.n_phi = opt.n_phi;
  P.alpha = alpha;
  P.delta = delta;
  P.beta = beta_flow;
  P.curvature.kind = CurvatureKind::sigma_k_root;
  P.curvature.argument = CurvatureArgument::principal_radii;
  P.curvature.k = k;
  P.psi = psi_flow;
  P.initial = opt.initial;
  P.time.max_steps = opt.max_steps;
  P.time.dt_safety = opt.dt_safety;
  P.time.record_every = 16;  // history is diagnostic only inside the solver
  P.stop.osc_tol = 0.0;      // anisotropic limits are not round
  P.symmetrize = symmetrize;

  std::vector<double> u;
  opt.initial.support(g, u);
  if (symmetrize) {
    std::vector<double> tmp(u.size());
    for (int i = 0; i < g.size(); ++i)
      tmp[i] = 0.5 * (u[i] + u[g.antipode[i]]);
    u.swap(tmp);
  }

  // Refinement rounds: drive the flow to a residual target, measure the
  // stationary equation from scratch, tighten on a miss. The first guess
  // converts the equation tolerance into flow units (d/dt ~ u * (Q - eta),
  // and the equation residual is ~ (k/beta) |Q - eta|/eta).
  double flow_tol = 0.5 * opt.residual_tol * eta * beta_flow / double(k);
  double eq_res = std::numeric_limits<double>::infinity();
  double c0 = 1.0;
  double tau_total = 0.0;
  long total_steps = 0;
  int rounds = 0;
  FlowResult R;
  SupportGeometry sg;

  for (; rounds < opt.max_rounds; ++rounds) {
    P.stop.residual_tol = flow_tol;
    P.prescale = (rounds == 0);  // a resumed field is already barrier-trapped
    R = run_flow(P, u);
    u = R.field;
    total_steps += R.steps;
    tau_total += R.tau_final;
    if (R.verdict == FlowVerdict::max_steps)
      throw NumericalError(
          "flow did not reach its stopping tolerance within max_steps "
          "(round " +
          std::to_string(rounds) + ", flow residual target " +
          std::to_string(flow_tol) + ")");
    sg.build(g, u);
    if (soliton) {
      c0 = kn ? 1.0 / (R.phi_final * eta) : 1.0;
      eq_res = soliton_residual(g, sg, prob.psi, alpha, delta, beta_flow, k,
                                c0 * eta);
    } else {
      c0 = kn ? pow_fast(R.phi_final, -double(n) / beta_flow)
              : pow_fast(eta, double(k) / beta_flow);
      eq_res = residual(g, sg, prob, c0).sup_rel;
    }
    if (eq_res <= opt.residual_tol) {
      ++rounds;
      break;
    }
    flow_tol /= 8.0;
  }
  if (!(eq_res <= opt.residual_tol))
    throw NumericalError("stationary residual stalled at " +
                         std::to_string(eq_res) + " after " +
                         std::to_string(rounds) + " rounds (target " +
                         std::to_string(opt.residual_tol) + ")");

  // Absorb c0 by dilation where the equation scales (u -> s u changes the
  // two sides by s^k and s^{p-q_eff}s^k); p = q is genuinely scale-invariant
  // and keeps c0 in the report.
  if (soliton) {
    if (sigma != 1.0 && c0 != 1.0) {
      const double lam = pow_fast(c0, 1.0 / (1.0 - sigma));
      for (double& v : u) v *= lam;
      sg.build(g, u);
      eq_res =
          soliton_residual(g, sg, prob.psi, alpha, delta, beta_flow, k, eta);
    }
  } else if (p_label != prob.q_effective()) {
    const double scale = pow_fast(c0, 1.0 / (p_label - prob.q_effective()));
    for (double& v : u) v *= scale;
    sg.build(g, u);
    eq_res = residual(g, sg, prob, 1.0).sup_rel;
  }

  double mn = u[0], mx = u[0], mean = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    mn = std::min(mn, u[i]);
    mx = std::max(mx, u[i]);
  }
  mean = integrate(g, u) / g.area;

  res.u = std::move(u);
  res.grid = std::move(R.grid);
  res.p = p_label;
  res.q = soliton ? q_label : prob.q_effective();
  res.alpha = alpha;
  res.delta = delta;
  res.beta_flow = beta_flow;
  res.eta = eta;
  res.c0 = c0;
  res.residual = eq_res;
  res.osc_ratio = (mx - mn) / mean;
  res.steps = total_steps;
  res.rounds = rounds;
  res.tau_final = tau_total;
  res.verdict = R.verdict;
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - clock0)
          .count();
  return res;
}

double uniqueness_probe(const MinkowskiProblem& prob, const SolveOptions& opt,
                        const ShapeSpec& start_a, const ShapeSpec& start_b) {
  SolveOptions oa = opt;
  oa.initial = start_a;
  SolveOptions ob = opt;
  ob.initial = start_b;
  MinkowskiResult ra = solve_minkowski(prob, oa);
  MinkowskiResult rb = solve_minkowski(prob, ob);

  const Grid& g = ra.grid;
  std::vector<double> ua = ra.u, ub = rb.u;
  if (ra.p == ra.q) {
    // dilation family: normalize each limit to unit q-mean radius
    const double q = ra.q;
    SupportGeometry sg;
    auto normalize = [&](std::vector<double>& v) {
      sg.build(g, v);
      double m = 0.0;
      for (int i = 0; i < g.size(); ++i)
        m += g.weight[i] * sg.u[i] * sg.det_a[i] *
             pow_fast(sg.rho[i], q - double(g.n) - 1.0);
      m /= g.area;
      const double s = pow_fast(m, -1.0 / q);
      for (double& x : v) x *= s;
    };
    normalize(ua);
    normalize(ub);
  }
  double sup = 0.0;
  for (std::size_t i = 0; i < ua.size(); ++i)
    sup = std::max(sup, std::abs(ua[i] - ub[i]));
  return sup;
}

}  // namespace curvflow
