#include "curvflow/curvature.hpp"

#include <cmath>

#include "curvflow/errors.hpp"
#include "curvflow/numeric.hpp"

namespace curvflow {

void CurvatureSpec::validate(int n) const {
  if (n != 1 && n != 2) throw ConfigError("curvature: n must be 1 or 2");
  switch (kind) {
    case CurvatureKind::sigma_k_root:
      if (k < 1 || k > n)
        throw ConfigError("curvature: sigma_k_root requires 1 <= k <= n");
      break;
    case CurvatureKind::quotient:
      if (!(0 <= k && k < l && l <= n))
        throw ConfigError("curvature: quotient requires 0 <= k < l <= n");
      break;
    case CurvatureKind::power_mean:
      if (!(m < 0.0) || !std::isfinite(m))
        throw ConfigError("curvature: power_mean requires finite m < 0");
      break;
  }
}

double sigma_k(int n, int k, double lam1, double lam2) {
  if (k == 0) return 1.0;
  if (n == 1) return k == 1 ? lam1 : 0.0;
  if (k == 1) return lam1 + lam2;
  if (k == 2) return lam1 * lam2;
  return 0.0;
}

void sigma_k_grad(int n, int k, double lam1, double lam2, double& d1,
                  double& d2) {
  (void)lam1;
  d1 = d2 = 0.0;
  if (k == 0) return;
  if (n == 1) {
    if (k == 1) d1 = 1.0;
    return;
  }
  if (k == 1) {
    d1 = d2 = 1.0;
  } else if (k == 2) {
    d1 = lam2;
    d2 = lam1;
  }
}

bool in_cone(const CurvatureSpec& spec, int n, double lam1, double lam2) {
  const int top = (spec.kind == CurvatureKind::sigma_k_root)  ? spec.k
                  : (spec.kind == CurvatureKind::quotient)    ? spec.l
                                                              : n;
  if (spec.kind == CurvatureKind::power_mean)
    return lam1 > 0.0 && (n == 1 || lam2 > 0.0);
  for (int j = 1; j <= top; ++j)
    if (!(sigma_k(n, j, lam1, lam2) > 0.0)) return false;
  return true;
}

CurvatureEval eval_curvature(const CurvatureSpec& spec, int n, double lam1,
                             double lam2) {
  CurvatureEval out;
  switch (spec.kind) {
    case CurvatureKind::sigma_k_root: {
      const double s = sigma_k(n, spec.k, lam1, lam2);
      const double inv_k = 1.0 / double(spec.k);
      out.f = pow_fast(s, inv_k);
      double d1, d2;
      sigma_k_grad(n, spec.k, lam1, lam2, d1, d2);
      const double c = inv_k * pow_fast(s, inv_k - 1.0);
      out.df1 = c * d1;
      out.df2 = c * d2;
      break;
    }
    case CurvatureKind::quotient: {
      const double sl = sigma_k(n, spec.l, lam1, lam2);
      const double sk = sigma_k(n, spec.k, lam1, lam2);
      const double inv_lk = 1.0 / double(spec.l - spec.k);
      out.f = pow_fast(sl / sk, inv_lk);
      double l1, l2, k1, k2;
      sigma_k_grad(n, spec.l, lam1, lam2, l1, l2);
      sigma_k_grad(n, spec.k, lam1, lam2, k1, k2);
      // logarithmic derivative: f_i = f/(l-k) * (sigma_l_i/sigma_l - sigma_k_i/sigma_k)
      const double c = out.f * inv_lk;
      out.df1 = c * (l1 / sl - k1 / sk);
      out.df2 = c * (l2 / sl - k2 / sk);
      break;
    }
    case CurvatureKind::power_mean: {
      const double inv_n = 1.0 / double(n);
      const double p1 = pow_fast(lam1, spec.m);
      const double p2 = (n == 2) ? pow_fast(lam2, spec.m) : 0.0;
      const double mean = (p1 + p2) * inv_n;
      out.f = pow_fast(mean, 1.0 / spec.m);
      // f_i = f^{1-m} lam_i^{m-1} / n
      const double c = pow_fast(out.f, 1.0 - spec.m) * inv_n;
      out.df1 = c * pow_fast(lam1, spec.m - 1.0);
      out.df2 = (n == 2) ? c * pow_fast(lam2, spec.m - 1.0) : 0.0;
      break;
    }
  }
  return out;
}

double unit_value(const CurvatureSpec& spec, int n) {
  return eval_curvature(spec, n, 1.0, 1.0).f;
}

double eta_kappa(const CurvatureSpec& spec, int n, double beta) {
  // Same code path as the flow speed on the unit sphere, so the two cancel
  // exactly in stationarity checks.
  return pow_fast(unit_value(spec, n), -beta);
}

double eta_lambda(int n, int k, double beta) {
  return pow_fast(sigma_k(n, k, 1.0, 1.0), beta / double(k));
}

}  // namespace curvflow
