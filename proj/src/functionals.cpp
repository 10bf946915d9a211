#include "curvflow/functionals.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "curvflow/errors.hpp"
#include "curvflow/numeric.hpp"
#include "curvflow/parallel.hpp"

namespace curvflow {

// ---------------------------------------------------------------------------
// exponent dictionary
// ---------------------------------------------------------------------------

double p_exponent(int n, double alpha, double beta) {
  return 1.0 + n * (1.0 - alpha) / beta;
}

double q_exponent(int n, double delta, double beta) {
  return n + 1.0 + n * delta / beta;
}

double alpha_from_p(int n, double p, double beta) {
  return 1.0 - beta * (p - 1.0) / n;
}

double delta_from_q(int n, double q, double beta) {
  return beta * (q - n - 1.0) / n;
}

double q_star(int n, double q) {
  if (q <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  if (q <= 1.0) return std::numeric_limits<double>::infinity();
  if (q < n + 1.0) return n * q / (q - 1.0);
  if (q == n + 1.0) return n + 1.0;
  return q / (q - n);
}

// ---------------------------------------------------------------------------
// measure context
// ---------------------------------------------------------------------------

void FunctionalContext::init(const Grid& g, const PsiSpec& spec, double beta) {
  grid = &g;
  const int sz = g.size();
  psi.resize(sz);
  mu_weight.resize(sz);
  spec.evaluate(g, psi);
  const double e = -double(g.n) / beta;
  par::for_each_node(sz, [&](int i) {
    mu_weight[i] = g.weight[i] * pow_fast(psi[i], e);
  });
  double total = 0.0;
  for (int i = 0; i < sz; ++i) total += mu_weight[i];
  mu_total = total;
}

double u_p_value(const FunctionalContext& fc, const std::vector<double>& u,
                 double p) {
  const int sz = fc.grid->size();
  double acc = 0.0;
  if (p == 0.0) {
    for (int i = 0; i < sz; ++i) acc += fc.mu_weight[i] * std::log(u[i]);
    return acc / fc.mu_total;
  }
  for (int i = 0; i < sz; ++i) acc += fc.mu_weight[i] * pow_fast(u[i], p);
  return acc / (p * fc.mu_total);
}

double v_q_value(const FunctionalContext& fc, const SupportGeometry& sg,
                 double q) {
  // rho^q dxi pulled back to the normal grid: rho^q * u det A / rho^{n+1}.
  const Grid& g = *fc.grid;
  const int sz = g.size();
  const double e = q - g.n - 1.0;
  double acc = 0.0;
  if (q == 0.0) {
    for (int i = 0; i < sz; ++i)
      acc += g.weight[i] * std::log(sg.rho[i]) * sg.u[i] *
             pow_fast(sg.rho[i], -double(g.n) - 1.0) * sg.det_a[i];
    return acc / g.area;
  }
  for (int i = 0; i < sz; ++i)
    acc += g.weight[i] * sg.u[i] * pow_fast(sg.rho[i], e) * sg.det_a[i];
  return acc / (q * g.area);
}

double phi_integral(const FunctionalContext& fc, const SupportGeometry& sg,
                    double alpha, double delta, double beta) {
  const Grid& g = *fc.grid;
  const int sz = g.size();
  const double n = g.n;
  const double e_num = n * delta / beta;          // q - n - 1
  const double e_den = delta + e_num;
  const double e_det = beta / n + 1.0;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < sz; ++i) {
    const double pr = pow_fast(sg.rho[i], e_num);
    num += g.weight[i] * sg.u[i] * pr * sg.det_a[i];
    den += g.weight[i] * fc.psi[i] * pow_fast(sg.u[i], alpha) *
           pow_fast(sg.rho[i], e_den) * pow_fast(sg.det_a[i], e_det);
  }
  if (!(den > 0.0) || !std::isfinite(den) || !std::isfinite(num))
    throw NumericalError("normalization integral degenerate (den=" +
                         std::to_string(den) + ")");
  return num / den;
}

double stationarity_gap(const FunctionalContext& fc, const SupportGeometry& sg,
                        double alpha, double delta, double beta, double phi) {
  const Grid& g = *fc.grid;
  const int sz = g.size();
  const double e_det = beta / double(g.n);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int i = 0; i < sz; ++i) {
    const double h = fc.psi[i] * pow_fast(sg.u[i], alpha) / sg.u[i] *
                     pow_fast(sg.rho[i], delta) * pow_fast(sg.det_a[i], e_det);
    lo = std::min(lo, h);
    hi = std::max(hi, h);
  }
  return phi * (hi - lo);
}

double v_q_value_radial(const Grid& g, const std::vector<double>& rho,
                        double q) {
  const int sz = g.size();
  double acc = 0.0;
  if (q == 0.0) {
    for (int i = 0; i < sz; ++i) acc += g.weight[i] * std::log(rho[i]);
    return acc / g.area;
  }
  for (int i = 0; i < sz; ++i) acc += g.weight[i] * pow_fast(rho[i], q);
  return acc / (q * g.area);
}

double u_p_value_radial(const Grid& g, const RadialGeometry& rg, double p) {
  const int sz = g.size();
  double acc = 0.0;
  if (p == 0.0) {
    for (int i = 0; i < sz; ++i) acc += g.weight[i] * std::log(rg.u[i]);
    return acc / g.area;
  }
  for (int i = 0; i < sz; ++i) acc += g.weight[i] * pow_fast(rg.u[i], p);
  return acc / (p * g.area);
}

PsiConditionReport check_psi_condition(const Grid& g, const PsiSpec& psi,
                                       double alpha, double beta) {
  const double denom = 1.0 + beta - alpha;
  if (std::abs(denom) < 1e-12)
    throw ConfigError(
        "anisotropy condition undefined: 1 + beta - alpha vanishes");
  const int sz = g.size();
  std::vector<double> gv(sz);
  psi.evaluate(g, gv);
  par::for_each_node(sz, [&](int i) { gv[i] = pow_fast(gv[i], 1.0 / denom); });

  Deriv d;
  d.resize(sz);
  DerivWorkspace ws;
  differentiate(g, gv, d, ws);

  PsiConditionReport rep;
  rep.min_eig = std::numeric_limits<double>::infinity();
  rep.max_eig = -rep.min_eig;
  for (int i = 0; i < sz; ++i) {
    if (g.n == 1) {
      const double m = d.h11[i] + gv[i];
      rep.min_eig = std::min(rep.min_eig, m);
      rep.max_eig = std::max(rep.max_eig, m);
      continue;
    }
    const double m11 = d.h11[i] + gv[i];
    const double m22 = d.h22[i] + gv[i];
    const double m12 = d.h12[i];
    const double tr = 0.5 * (m11 + m22);
    const double disc = std::sqrt(0.25 * (m11 - m22) * (m11 - m22) + m12 * m12);
    rep.min_eig = std::min(rep.min_eig, tr - disc);
    rep.max_eig = std::max(rep.max_eig, tr + disc);
  }
  rep.positive_definite = rep.min_eig > 0.0;
  rep.negative_definite = rep.max_eig < 0.0;
  return rep;
}

}  // namespace curvflow
