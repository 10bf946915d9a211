#include "curvflow/shape.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "curvflow/errors.hpp"
#include "curvflow/numeric.hpp"
#include "curvflow/parallel.hpp"

namespace curvflow {

namespace {

double dot3(const std::array<double, 3>& a, double x, double y, double z) {
  return a[0] * x + a[1] * y + a[2] * z;
}

double norm3(const std::array<double, 3>& a, int n) {
  const double z = (n == 2) ? a[2] : 0.0;
  return std::sqrt(a[0] * a[0] + a[1] * a[1] + z * z);
}

// Serial guard pass: geometry builds must not throw from inside a parallel
// region, so positivity is checked up front.
void require_positive_finite(const std::vector<double>& v, const char* what) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i]) || !(v[i] > 0.0))
      throw NumericalError(std::string(what) + " not positive/finite at node " +
                           std::to_string(i) + " (value " +
                           std::to_string(v[i]) + ")");
  }
}

void eig_sym2(double a, double b, double c, double& lo, double& hi) {
  // eigenvalues of [[a, b], [b, c]]
  const double mid = 0.5 * (a + c);
  const double disc = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
  lo = mid - disc;
  hi = mid + disc;
}

// Eigenvalue range of a symmetric 3x3 matrix by cyclic Jacobi sweeps --
// plenty for validating a handful of quadratic-weight coefficients.
void eig_range_sym3(double m[3][3], double& lo, double& hi) {
  for (int sweep = 0; sweep < 32; ++sweep) {
    double off = std::abs(m[0][1]) + std::abs(m[0][2]) + std::abs(m[1][2]);
    if (off < 1e-15 * (1.0 + std::abs(m[0][0]) + std::abs(m[1][1]) +
                       std::abs(m[2][2])))
      break;
    for (int p = 0; p < 2; ++p)
      for (int q = p + 1; q < 3; ++q) {
        if (m[p][q] == 0.0) continue;
        const double theta = 0.5 * std::atan2(2.0 * m[p][q], m[q][q] - m[p][p]);
        const double cth = std::cos(theta), sth = std::sin(theta);
        for (int r = 0; r < 3; ++r) {
          const double mp = m[r][p], mq = m[r][q];
          m[r][p] = cth * mp - sth * mq;
          m[r][q] = sth * mp + cth * mq;
        }
        for (int r = 0; r < 3; ++r) {
          const double mp = m[p][r], mq = m[q][r];
          m[p][r] = cth * mp - sth * mq;
          m[q][r] = sth * mp + cth * mq;
        }
        m[p][q] = m[q][p] = 0.0;
      }
  }
  lo = std::min({m[0][0], m[1][1], m[2][2]});
  hi = std::max({m[0][0], m[1][1], m[2][2]});
}

}  // namespace

// ---------------------------------------------------------------------------
// RadialGeometry

void RadialGeometry::build(const Grid& g, const std::vector<double>& rho_in) {
  const int sz = g.size();
  require_positive_finite(rho_in, "radial function");
  rho = rho_in;
  gamma.resize(sz);
  grad2.resize(sz);
  omega.resize(sz);
  u.resize(sz);
  kappa1.resize(sz);
  kappa2.assign(sz, 0.0);

  par::for_each_node(sz, [&](int i) { gamma[i] = std::log(rho[i]); });
  differentiate(g, gamma, d, ws_);

  if (g.n == 1) {
    par::for_each_node(sz, [&](int i) {
      const double gr2 = d.g1[i] * d.g1[i];
      const double om = std::sqrt(1.0 + gr2);
      grad2[i] = gr2;
      omega[i] = om;
      u[i] = rho[i] / om;
      kappa1[i] = (1.0 - d.h11[i] / (om * om)) / (rho[i] * om);
    });
    return;
  }

  par::for_each_node(sz, [&](int i) {
    const double g1 = d.g1[i], g2 = d.g2[i];
    const double gr2 = g1 * g1 + g2 * g2;
    const double om = std::sqrt(1.0 + gr2);
    grad2[i] = gr2;
    omega[i] = om;
    u[i] = rho[i] / om;

    const double h11 = d.h11[i], h12 = d.h12[i], h22 = d.h22[i];
    double s11 = h11, s12 = h12, s22 = h22;
    if (gr2 > 1e-28) {
      // S = B^{1/2} H B^{1/2}, B^{1/2} = I + (1/omega - 1) v v^T, v = Dg/|Dg|
      const double inv_norm = 1.0 / std::sqrt(gr2);
      const double v1 = g1 * inv_norm, v2 = g2 * inv_norm;
      const double a = 1.0 / om - 1.0;
      const double hv1 = h11 * v1 + h12 * v2;
      const double hv2 = h12 * v1 + h22 * v2;
      // M = H (I + a v v^T)
      const double m11 = h11 + a * hv1 * v1;
      const double m12 = h12 + a * hv1 * v2;
      const double m21 = h12 + a * hv2 * v1;
      const double m22 = h22 + a * hv2 * v2;
      // S = (I + a v v^T) M; symmetrize the off-diagonal against roundoff
      const double vm1 = v1 * m11 + v2 * m21;
      const double vm2 = v1 * m12 + v2 * m22;
      s11 = m11 + a * v1 * vm1;
      s22 = m22 + a * v2 * vm2;
      s12 = 0.5 * ((m12 + a * v1 * vm2) + (m21 + a * v2 * vm1));
    }
    double lo, hi;
    eig_sym2(s11, s12, s22, lo, hi);
    const double den = rho[i] * om;
    kappa1[i] = (1.0 - hi) / den;
    kappa2[i] = (1.0 - lo) / den;
  });
}

// ---------------------------------------------------------------------------
// SupportGeometry

void SupportGeometry::build(const Grid& g, const std::vector<double>& u_in) {
  const int sz = g.size();
  require_positive_finite(u_in, "support function");
  u = u_in;
  rho.resize(sz);
  a11.resize(sz);
  a12.assign(sz, 0.0);
  a22.assign(sz, 0.0);
  lam1.resize(sz);
  lam2.assign(sz, 0.0);
  det_a.resize(sz);

  differentiate(g, u, d, ws_);

  if (g.n == 1) {
    par::for_each_node(sz, [&](int i) {
      rho[i] = std::sqrt(u[i] * u[i] + d.g1[i] * d.g1[i]);
      const double a = d.h11[i] + u[i];
      a11[i] = a;
      lam1[i] = a;
      det_a[i] = a;
    });
    return;
  }

  par::for_each_node(sz, [&](int i) {
    rho[i] = std::sqrt(u[i] * u[i] + d.g1[i] * d.g1[i] + d.g2[i] * d.g2[i]);
    const double a = d.h11[i] + u[i];
    const double b = d.h12[i];
    const double c = d.h22[i] + u[i];
    a11[i] = a;
    a12[i] = b;
    a22[i] = c;
    det_a[i] = a * c - b * b;
    eig_sym2(a, b, c, lam1[i], lam2[i]);
  });
}

// ---------------------------------------------------------------------------
// PsiSpec

void PsiSpec::validate(int n) const {
  if (!(n == 1 || n == 2)) throw ConfigError("psi: n must be 1 or 2");
  if (!std::isfinite(power)) throw ConfigError("psi: power must be finite");
  if (!std::isfinite(value)) throw ConfigError("psi: value must be finite");
  switch (kind) {
    case Kind::constant:
      if (!(value > 0.0))
        throw ConfigError("psi: constant value must be positive");
      break;
    case Kind::linear:
      if (!std::isfinite(c)) throw ConfigError("psi: amplitude must be finite");
      break;
    case Kind::quadratic:
      if (terms.size() > 3)
        throw ConfigError("psi: at most 3 quadratic terms");
      for (const QuadTerm& t : terms)
        if (!std::isfinite(t.a) || !std::isfinite(t.axis[0]) ||
            !std::isfinite(t.axis[1]) || !std::isfinite(t.axis[2]))
          throw ConfigError("psi: quadratic coefficients must be finite");
      break;
  }
  if (kind != Kind::constant && !(min_value(n) > 0.0))
    throw ConfigError("psi: not positive on the sphere (min " +
                      std::to_string(min_value(n)) + ")");
}

bool PsiSpec::is_constant_one() const {
  if (power == 0.0) return true;
  if (value != 1.0) return false;
  switch (kind) {
    case Kind::constant: return true;
    case Kind::linear: return c == 0.0;
    case Kind::quadratic:
      for (const QuadTerm& t : terms)
        if (t.a != 0.0) return false;
      return true;
  }
  return false;
}

bool PsiSpec::is_zonal(int n) const {
  if (n == 1 || kind == Kind::constant) return true;
  if (kind == Kind::linear)
    return c == 0.0 || (axis[0] == 0.0 && axis[1] == 0.0);
  for (const QuadTerm& t : terms)
    if (t.a != 0.0 && (t.axis[0] != 0.0 || t.axis[1] != 0.0)) return false;
  return true;
}

void PsiSpec::evaluate(const Grid& g, std::vector<double>& out) const {
  const int sz = g.size();
  out.resize(sz);
  const double e = power;
  if (kind == Kind::constant) {
    std::fill(out.begin(), out.end(), pow_fast(value, e));
    return;
  }
  auto base_at = [&](double x, double y, double z) {
    if (kind == Kind::linear) return value + c * dot3(axis, x, y, z);
    double b = value;
    for (const QuadTerm& t : terms) {
      const double d = dot3(t.axis, x, y, z);
      b += t.a * d * d;
    }
    return b;
  };
  if (g.n == 2 && is_zonal(2)) {
    // evaluate from per-row data: bitwise ring-constant
    par::for_each_row(g.n_theta, [&](int j) {
      const double v = pow_fast(base_at(0.0, 0.0, g.cos_theta[j]), e);
      for (int k = 0; k < g.n_phi; ++k) out[g.index(j, k)] = v;
    });
    return;
  }
  par::for_each_node(sz, [&](int i) {
    out[i] = pow_fast(base_at(g.x1[i], g.x2[i], g.x3[i]), e);
  });
}

double PsiSpec::min_value(int n) const {
  double lo = value, hi = value;  // range of the base over the sphere
  switch (kind) {
    case Kind::constant:
      break;
    case Kind::linear: {
      const double a = norm3(axis, n);
      lo = value - std::abs(c) * a;
      hi = value + std::abs(c) * a;
      break;
    }
    case Kind::quadratic: {
      // base = value + x^T M x with M = sum_t a_t e_t e_t^T, so the range
      // over the unit sphere is value + [lambda_min, lambda_max](M)
      double m[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
      for (const QuadTerm& t : terms)
        for (int r = 0; r < 3; ++r)
          for (int s = 0; s < 3; ++s) m[r][s] += t.a * t.axis[r] * t.axis[s];
      double elo, ehi;
      if (n == 1) eig_sym2(m[0][0], m[0][1], m[1][1], elo, ehi);
      else eig_range_sym3(m, elo, ehi);
      lo = value + elo;
      hi = value + ehi;
      break;
    }
  }
  return power >= 0.0 ? pow_fast(lo, power) : pow_fast(hi, power);
}

PsiSpec PsiSpec::raised(double e) const {
  PsiSpec out = *this;
  out.power = power * e;
  return out;
}

// ---------------------------------------------------------------------------
// ShapeSpec

void ShapeSpec::validate(int n) const {
  if (!(n == 1 || n == 2)) throw ConfigError("shape: n must be 1 or 2");
  switch (kind) {
    case Kind::ball:
      if (!(radius > 0.0)) throw ConfigError("shape: ball radius must be > 0");
      break;
    case Kind::offset_ball: {
      if (!(radius > 0.0))
        throw ConfigError("shape: offset_ball radius must be > 0");
      if (!(norm3(center, n) < radius))
        throw ConfigError(
            "shape: offset_ball requires |center| < radius (origin inside)");
      break;
    }
    case Kind::radial_graph: {
      if (!(radius > 0.0))
        throw ConfigError("shape: radial_graph base radius must be > 0");
      if (!(std::abs(c) * norm3(axis, n) < radius))
        throw ConfigError(
            "shape: radial_graph requires |c||axis| < radius (rho > 0)");
      break;
    }
    case Kind::zonal_mode: {
      if (!(radius > 0.0))
        throw ConfigError("shape: zonal_mode base radius must be > 0");
      if (mode < 1) throw ConfigError("shape: zonal_mode wavenumber must be >= 1");
      // |P_mode| <= 1 and |cos| <= 1, so this keeps rho positive
      if (!(std::abs(c) < radius))
        throw ConfigError("shape: zonal_mode requires |c| < radius (rho > 0)");
      break;
    }
    case Kind::ellipsoid: {
      const int last = (n == 2) ? 2 : 1;
      for (int i = 0; i <= last; ++i)
        if (!(semi_axes[i] > 0.0))
          throw ConfigError("shape: ellipsoid semi-axes must be > 0");
      break;
    }
  }
}

bool ShapeSpec::is_zonal(int n) const {
  if (n == 1) return true;
  switch (kind) {
    case Kind::ball:
      return true;
    case Kind::offset_ball:
      return center[0] == 0.0 && center[1] == 0.0;
    case Kind::radial_graph:
      return c == 0.0 || (axis[0] == 0.0 && axis[1] == 0.0);
    case Kind::zonal_mode:
      return true;
    case Kind::ellipsoid:
      return semi_axes[0] == semi_axes[1];
  }
  return false;
}

void ShapeSpec::radial(const Grid& g, std::vector<double>& rho) const {
  const int sz = g.size();
  rho.resize(sz);
  const bool zonal2 = (g.n == 2) && is_zonal(2);

  switch (kind) {
    case Kind::ball:
      std::fill(rho.begin(), rho.end(), radius);
      return;
    case Kind::offset_ball: {
      const double r2 = radius * radius;
      const double c2 = center[0] * center[0] + center[1] * center[1] +
                        ((g.n == 2) ? center[2] * center[2] : 0.0);
      if (zonal2) {
        par::for_each_row(g.n_theta, [&](int j) {
          const double t = center[2] * g.cos_theta[j];
          const double v = t + std::sqrt(r2 - c2 + t * t);
          for (int k = 0; k < g.n_phi; ++k) rho[g.index(j, k)] = v;
        });
      } else {
        par::for_each_node(sz, [&](int i) {
          const double t = dot3(center, g.x1[i], g.x2[i], g.x3[i]);
          rho[i] = t + std::sqrt(r2 - c2 + t * t);
        });
      }
      return;
    }
    case Kind::radial_graph: {
      if (zonal2) {
        par::for_each_row(g.n_theta, [&](int j) {
          const double v = radius + c * axis[2] * g.cos_theta[j];
          for (int k = 0; k < g.n_phi; ++k) rho[g.index(j, k)] = v;
        });
      } else {
        par::for_each_node(sz, [&](int i) {
          rho[i] = radius + c * dot3(axis, g.x1[i], g.x2[i], g.x3[i]);
        });
      }
      return;
    }
    case Kind::zonal_mode: {
      if (g.n == 1) {
        par::for_each_node(sz, [&](int i) {
          rho[i] = radius + c * std::cos(double(mode) * g.theta[i]);
        });
      } else {
        par::for_each_row(g.n_theta, [&](int j) {
          const double v = radius + c * std::legendre(mode, g.cos_theta[j]);
          for (int k = 0; k < g.n_phi; ++k) rho[g.index(j, k)] = v;
        });
      }
      return;
    }
    case Kind::ellipsoid: {
      const double ia = 1.0 / (semi_axes[0] * semi_axes[0]);
      const double ib = 1.0 / (semi_axes[1] * semi_axes[1]);
      const double ic = 1.0 / (semi_axes[2] * semi_axes[2]);
      if (zonal2) {
        par::for_each_row(g.n_theta, [&](int j) {
          const double s = g.sin_theta[j], cth = g.cos_theta[j];
          const double v = 1.0 / std::sqrt(s * s * ia + cth * cth * ic);
          for (int k = 0; k < g.n_phi; ++k) rho[g.index(j, k)] = v;
        });
      } else {
        par::for_each_node(sz, [&](int i) {
          const double q = g.x1[i] * g.x1[i] * ia + g.x2[i] * g.x2[i] * ib +
                           g.x3[i] * g.x3[i] * ic;
          rho[i] = 1.0 / std::sqrt(q);
        });
      }
      return;
    }
  }
}

void ShapeSpec::support(const Grid& g, std::vector<double>& u) const {
  const int sz = g.size();
  u.resize(sz);
  const bool zonal2 = (g.n == 2) && is_zonal(2);

  switch (kind) {
    case Kind::ball:
      std::fill(u.begin(), u.end(), radius);
      return;
    case Kind::offset_ball: {
      if (zonal2) {
        par::for_each_row(g.n_theta, [&](int j) {
          const double v = radius + center[2] * g.cos_theta[j];
          for (int k = 0; k < g.n_phi; ++k) u[g.index(j, k)] = v;
        });
      } else {
        par::for_each_node(sz, [&](int i) {
          u[i] = radius + dot3(center, g.x1[i], g.x2[i], g.x3[i]);
        });
      }
      return;
    }
    case Kind::ellipsoid: {
      const double a2 = semi_axes[0] * semi_axes[0];
      const double b2 = semi_axes[1] * semi_axes[1];
      const double c2 = semi_axes[2] * semi_axes[2];
      if (zonal2) {
        par::for_each_row(g.n_theta, [&](int j) {
          const double s = g.sin_theta[j], cth = g.cos_theta[j];
          const double v = std::sqrt(a2 * s * s + c2 * cth * cth);
          for (int k = 0; k < g.n_phi; ++k) u[g.index(j, k)] = v;
        });
      } else {
        par::for_each_node(sz, [&](int i) {
          u[i] = std::sqrt(a2 * g.x1[i] * g.x1[i] + b2 * g.x2[i] * g.x2[i] +
                           c2 * g.x3[i] * g.x3[i]);
        });
      }
      return;
    }
    case Kind::radial_graph:
    case Kind::zonal_mode: {
      std::vector<double> rho;
      radial(g, rho);
      u = support_from_radial(g, rho);
      if (zonal2) {
        // kill the sub-roundoff ring jitter of the numeric envelope so the
        // zonal fast path stays exact
        for (int j = 0; j < g.n_theta; ++j) {
          const double v = u[g.index(j, 0)];
          for (int k = 1; k < g.n_phi; ++k) u[g.index(j, k)] = v;
        }
      }
      return;
    }
  }
}

// ---------------------------------------------------------------------------
// support_from_radial

std::vector<double> support_from_radial(const Grid& g,
                                        const std::vector<double>& rho) {
  const int sz = g.size();
  require_positive_finite(rho, "radial function");

  // Reject non-convex bodies up front: the envelope below would otherwise
  // silently return the support function of the convex hull instead of the
  // body the caller asked for.  Convexity of a star-shaped graph shows up
  // directly in its own principal curvatures.
  {
    RadialGeometry rg;
    rg.build(g, rho);
    double min_kap = rg.kappa1[0];
    for (int i = 1; i < sz; ++i) min_kap = std::min(min_kap, rg.kappa1[i]);
    if (!(min_kap > 0.0))
      throw NumericalError(
          "support_from_radial: radial graph is not uniformly convex "
          "(min principal curvature " +
          std::to_string(min_kap) + ")");
  }

  // surface points rho(xi) xi
  std::vector<double> px(sz), py(sz), pz(sz);
  par::for_each_node(sz, [&](int i) {
    px[i] = rho[i] * g.x1[i];
    py[i] = rho[i] * g.x2[i];
    pz[i] = rho[i] * g.x3[i];
  });

  std::vector<double> u(sz);

  if (g.n == 1) {
    const int N = g.n_theta;
    par::for_each_node(N, [&](int i) {
      double best = -1e300;
      int arg = 0;
      for (int j = 0; j < N; ++j) {
        const double v = px[j] * g.x1[i] + py[j] * g.x2[i];
        if (v > best) {
          best = v;
          arg = j;
        }
      }
      const int jp = (arg + 1) % N, jm = (arg + N - 1) % N;
      const double fp = px[jp] * g.x1[i] + py[jp] * g.x2[i];
      const double fm = px[jm] * g.x1[i] + py[jm] * g.x2[i];
      const double b = 0.5 * (fp - fm);
      const double cc = 0.5 * (fp - 2.0 * best + fm);
      double refined = best;
      if (cc < 0.0) {
        double s = -b / (2.0 * cc);
        s = std::clamp(s, -1.0, 1.0);
        refined = best + b * s + cc * s * s;
      }
      u[i] = std::max(best, refined);
    });
    // convexity check below is shared
  } else {
    const int NT = g.n_theta, NP = g.n_phi;
    par::for_each_node(sz, [&](int i) {
      // scan
      double best = -1e300;
      int arg = 0;
      for (int j = 0; j < sz; ++j) {
        const double v = px[j] * g.x1[i] + py[j] * g.x2[i] + pz[j] * g.x3[i];
        if (v > best) {
          best = v;
          arg = j;
        }
      }
      // local quadratic refinement on the 9-point stencil around the argmax
      const int aj = arg / NP, ak = arg % NP;
      auto F = [&](int dj, int dk) {
        // inner product field for THIS target direction, evaluated lazily
        const int jj = aj + dj;
        const int NPk = ak + dk;
        // emulate field_at for the implicit field
        int j = jj, k = ((NPk % NP) + NP) % NP;
        if (j == -1) {
          j = 0;
          k = (k + NP / 2) % NP;
        } else if (j == NT) {
          j = NT - 1;
          k = (k + NP / 2) % NP;
        }
        const int id = j * NP + k;
        return px[id] * g.x1[i] + py[id] * g.x2[i] + pz[id] * g.x3[i];
      };
      const double f0 = best;
      const double fpo = F(1, 0), fmo = F(-1, 0);
      const double fop = F(0, 1), fom = F(0, -1);
      const double b1 = 0.5 * (fpo - fmo);
      const double b2 = 0.5 * (fop - fom);
      const double q11 = fpo - 2.0 * f0 + fmo;
      const double q22 = fop - 2.0 * f0 + fom;
      const double q12 = 0.25 * (F(1, 1) - F(1, -1) - F(-1, 1) + F(-1, -1));
      const double det = q11 * q22 - q12 * q12;
      double refined = f0;
      if (q11 < 0.0 && det > 0.0) {  // negative definite
        double d1 = -(q22 * b1 - q12 * b2) / det;
        double d2 = -(q11 * b2 - q12 * b1) / det;
        d1 = std::clamp(d1, -1.0, 1.0);
        d2 = std::clamp(d2, -1.0, 1.0);
        refined = f0 + b1 * d1 + b2 * d2 +
                  0.5 * (q11 * d1 * d1 + 2.0 * q12 * d1 * d2 + q22 * d2 * d2);
      }
      u[i] = std::max(f0, refined);
    });
  }

  // Backstop on the output side: a degenerate envelope (kinked input data at
  // the grid scale) shows up as non-positive second differences.
  SupportGeometry sg;
  sg.build(g, u);
  double min_lam = sg.lam1[0];
  for (int i = 1; i < sz; ++i) min_lam = std::min(min_lam, sg.lam1[i]);
  if (!(min_lam > 0.0))
    throw NumericalError(
        "support_from_radial: radial graph is not uniformly convex "
        "(min principal radius " +
        std::to_string(min_lam) + ")");
  return u;
}

}  // namespace curvflow
