#pragma once

// Small numeric helpers shared across modules.

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace curvflow {

// Power with fast paths for the handful of exponents the flows actually use.
// Every power in the library goes through this helper so that algebraically
// equal quantities (e.g. the speed on the unit sphere and its normalizing
// constant) are computed through the identical instruction sequence and
// cancel exactly.
inline double pow_fast(double x, double e) {
  if (e == 0.0) return 1.0;
  if (e == 1.0) return x;
  if (e == -1.0) return 1.0 / x;
  if (e == 2.0) return x * x;
  if (e == -2.0) return 1.0 / (x * x);
  if (e == 0.5) return std::sqrt(x);
  if (e == -0.5) return 1.0 / std::sqrt(x);
  return std::pow(x, e);
}

struct MinMax {
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
  double osc() const { return max - min; }
};

// Serial reduction in index order (deterministic for any thread count).
inline MinMax min_max(const std::vector<double>& v) {
  MinMax r;
  for (double x : v) {
    if (x < r.min) r.min = x;
    if (x > r.max) r.max = x;
  }
  return r;
}

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;  // coefficient of determination
};

// Ordinary least squares y ~ intercept + slope * x.
inline LinearFit linear_fit(const std::vector<double>& x,
                            const std::vector<double>& y) {
  LinearFit f;
  const std::size_t m = x.size() < y.size() ? x.size() : y.size();
  if (m < 2) return f;
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / double(m), my = sy / double(m);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
  return r;
}

}  // namespace curvflow
