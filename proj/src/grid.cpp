#include "curvflow/grid.hpp"

#include <algorithm>
#include <cmath>

#include "curvflow/errors.hpp"
#include "curvflow/parallel.hpp"

namespace curvflow {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void Deriv::resize(int count) {
  g1.resize(count);
  g2.resize(count);
  h11.resize(count);
  h12.resize(count);
  h22.resize(count);
}

Grid Grid::make(int n, int n_theta, int n_phi) {
  Grid g;
  g.n = n;
  if (n == 1) {
    if (n_theta < 8 || n_theta % 2 != 0)
      throw ConfigError("Grid: n=1 requires even n_theta >= 8");
    g.n_theta = n_theta;
    g.n_phi = 1;
    g.h_theta = 2.0 * kPi / n_theta;
    g.h_phi = 0.0;
    g.area = 2.0 * kPi;
    g.theta.resize(n_theta);
    g.sin_theta.resize(n_theta);
    g.cos_theta.resize(n_theta);
    g.cot_theta.assign(n_theta, 0.0);
    g.x1.resize(n_theta);
    g.x2.resize(n_theta);
    g.x3.assign(n_theta, 0.0);
    // Equal weights; exact renormalization so constants integrate exactly.
    g.weight.assign(n_theta, g.area / double(n_theta));
    g.antipode.resize(n_theta);
    for (int k = 0; k < n_theta; ++k) {
      g.theta[k] = (k + 0.5) * g.h_theta;
      g.sin_theta[k] = std::sin(g.theta[k]);
      g.cos_theta[k] = std::cos(g.theta[k]);
      g.x1[k] = g.cos_theta[k];
      g.x2[k] = g.sin_theta[k];
      g.antipode[k] = (k + n_theta / 2) % n_theta;
    }
    return g;
  }
  if (n != 2) throw ConfigError("Grid: sphere dimension must be 1 or 2");
  if (n_theta < 4) throw ConfigError("Grid: n=2 requires n_theta >= 4");
  if (n_phi < 8 || n_phi % 2 != 0)
    throw ConfigError("Grid: n=2 requires even n_phi >= 8");

  g.n_theta = n_theta;
  g.n_phi = n_phi;
  g.h_theta = kPi / n_theta;
  g.h_phi = 2.0 * kPi / n_phi;
  g.area = 4.0 * kPi;

  g.theta.resize(n_theta);
  g.sin_theta.resize(n_theta);
  g.cos_theta.resize(n_theta);
  g.cot_theta.resize(n_theta);
  double row_sum = 0.0;
  for (int j = 0; j < n_theta; ++j) {
    g.theta[j] = (j + 0.5) * g.h_theta;
    g.sin_theta[j] = std::sin(g.theta[j]);
    g.cos_theta[j] = std::cos(g.theta[j]);
    g.cot_theta[j] = g.cos_theta[j] / g.sin_theta[j];
    row_sum += g.sin_theta[j];
  }

  const int sz = n_theta * n_phi;
  g.weight.resize(sz);
  g.x1.resize(sz);
  g.x2.resize(sz);
  g.x3.resize(sz);
  g.antipode.resize(sz);

  // weight = sin(theta_j) * scale; scale chosen so the total is exactly 4*pi.
  // All nodes of a ring share the same double, which keeps ring-constant
  // fields ring-constant through every weighted sum.
  const double scale = g.area / (double(n_phi) * row_sum);
  std::vector<double> cph(n_phi), sph(n_phi);
  for (int k = 0; k < n_phi; ++k) {
    const double phi = k * g.h_phi;
    cph[k] = std::cos(phi);
    sph[k] = std::sin(phi);
  }
  const int half = n_phi / 2;
  for (int j = 0; j < n_theta; ++j) {
    const double wrow = g.sin_theta[j] * scale;
    for (int k = 0; k < n_phi; ++k) {
      const int i = j * n_phi + k;
      g.weight[i] = wrow;
      g.x1[i] = g.sin_theta[j] * cph[k];
      g.x2[i] = g.sin_theta[j] * sph[k];
      g.x3[i] = g.cos_theta[j];
      g.antipode[i] = (n_theta - 1 - j) * n_phi + (k + half) % n_phi;
    }
  }
  return g;
}

double Grid::min_spacing_pole_aware() const {
  if (n == 1) return h_theta;
  const double s = std::min(sin_theta.front(), sin_theta.back());
  return std::min(h_theta, h_phi * s);
}

double Grid::min_spacing_zonal() const {
  if (n == 1) return h_theta;
  return std::min(h_theta, h_phi);
}

namespace {

void differentiate_circle(const Grid& g, const std::vector<double>& w,
                          Deriv& out) {
  const int N = g.n_theta;
  // Trigonometric denominators: exact on the first Fourier mode, still
  // second order on everything else.
  const double d1 = 2.0 * std::sin(g.h_theta);
  const double d2 = 4.0 * std::sin(0.5 * g.h_theta) * std::sin(0.5 * g.h_theta);
  par::for_each_node(N, [&](int k) {
    const int kp = (k + 1 == N) ? 0 : k + 1;
    const int km = (k == 0) ? N - 1 : k - 1;
    out.g1[k] = (w[kp] - w[km]) / d1;
    out.h11[k] = (w[kp] - 2.0 * w[k] + w[km]) / d2;
  });
  std::fill(out.g2.begin(), out.g2.end(), 0.0);
  std::fill(out.h12.begin(), out.h12.end(), 0.0);
  std::fill(out.h22.begin(), out.h22.end(), 0.0);
}

void differentiate_sphere(const Grid& g, const std::vector<double>& w,
                          Deriv& out, DerivWorkspace& ws) {
  const int NT = g.n_theta, NP = g.n_phi, half = NP / 2;
  const int sz = NT * NP;
  const double inv_2ht = 1.0 / (2.0 * g.h_theta);
  const double inv_ht2 = 1.0 / (g.h_theta * g.h_theta);
  const double d1p = 2.0 * std::sin(g.h_phi);
  const double sh = std::sin(0.5 * g.h_phi);
  const double d2p = 4.0 * sh * sh;

  ws.mu.resize(NT);
  ws.wp.resize(sz);
  ws.vc.resize(sz);

  // Ring means: serial inner loop in column order (deterministic), rows in
  // parallel.
  par::for_each_row(NT, [&](int j) {
    const double* row = &w[j * NP];
    double s = 0.0;
    for (int k = 0; k < NP; ++k) s += row[k];
    ws.mu[j] = s / double(NP);
  });

  // Pass 1: fluctuation w' = w - mu, the odd intermediate field w' cot,
  // and g2 = (1/sin) d_phi w.
  par::for_each_row(NT, [&](int j) {
    const double mu = ws.mu[j];
    const double cot = g.cot_theta[j];
    const double inv_sin = 1.0 / g.sin_theta[j];
    const int base = j * NP;
    for (int k = 0; k < NP; ++k) {
      const int i = base + k;
      const int kp = base + ((k + 1 == NP) ? 0 : k + 1);
      const int km = base + ((k == 0) ? NP - 1 : k - 1);
      const double fluct = w[i] - mu;
      ws.wp[i] = fluct;
      ws.vc[i] = fluct * cot;
      out.g2[i] = (w[kp] - w[km]) / d1p * inv_sin;
    }
  });

  // Pass 2: theta stencils with parity-correct ghost rows. A scalar field
  // continues across a pole as w(-theta,phi) = w(theta,phi+pi): ghost row is
  // the boundary row with columns shifted by half a turn. g2 and w' cot pick
  // up a sign under that continuation (they carry one factor odd in theta),
  // so their ghosts are the shifted rows negated.
  par::for_each_row(NT, [&](int j) {
    const bool top = (j == 0), bot = (j == NT - 1);
    const double cot = g.cot_theta[j];
    const double inv_sin2 = 1.0 / (g.sin_theta[j] * g.sin_theta[j]);
    const double mu_m = top ? ws.mu[0] : ws.mu[j - 1];
    const double mu_p = bot ? ws.mu[NT - 1] : ws.mu[j + 1];
    const double dmu = (mu_p - mu_m) * inv_2ht;  // ring mean is even across poles
    const int base = j * NP;
    const int base_m = top ? 0 : (j - 1) * NP;
    const int base_p = bot ? (NT - 1) * NP : (j + 1) * NP;
    for (int k = 0; k < NP; ++k) {
      const int i = base + k;
      const int ks = (k < half) ? k + half : k - half;
      const int im = base_m + (top ? ks : k);
      const int ip = base_p + (bot ? ks : k);
      const double sgn_m = top ? -1.0 : 1.0;
      const double sgn_p = bot ? -1.0 : 1.0;

      const double w_m = w[im], w_p = w[ip];
      out.g1[i] = (w_p - w_m) * inv_2ht;
      out.h11[i] = (w_p - 2.0 * w[i] + w_m) * inv_ht2;
      out.h12[i] = (sgn_p * out.g2[ip] - sgn_m * out.g2[im]) * inv_2ht;

      const int kp = base + ((k + 1 == NP) ? 0 : k + 1);
      const int km = base + ((k == 0) ? NP - 1 : k - 1);
      const double fluct = ws.wp[i];
      const double dpp = (ws.wp[kp] - 2.0 * fluct + ws.wp[km]) / d2p;
      out.h22[i] = cot * dmu + (dpp + fluct) * inv_sin2 +
                   (sgn_p * ws.vc[ip] - sgn_m * ws.vc[im]) * inv_2ht;
    }
  });
}

}  // namespace

void differentiate(const Grid& g, const std::vector<double>& w, Deriv& out,
                   DerivWorkspace& ws) {
  out.resize(g.size());
  if (g.n == 1) {
    differentiate_circle(g, w, out);
  } else {
    differentiate_sphere(g, w, out, ws);
  }
}

double integrate(const Grid& g, const std::vector<double>& f) {
  const int sz = g.size();
  double s = 0.0;
  for (int i = 0; i < sz; ++i) s += f[i] * g.weight[i];
  return s;
}

}  // namespace curvflow
