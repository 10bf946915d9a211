#pragma once

// Discretization of the parameter sphere S^n (n = 1 or 2) and the derivative
// kernel used by every geometry computation.
//
// n = 2: a cell-centred latitude-longitude grid
//          theta_j = (j + 1/2) h_theta,  j = 0..n_theta-1,  h_theta = pi/n_theta
//          phi_k   = k h_phi,            k = 0..n_phi-1,    h_phi = 2 pi/n_phi
//        (n_phi even). There is no node at either pole; rows j=0 and
//        j=n_theta-1 sit half a cell away. Values "across" a pole are
//        obtained from the same field half a turn around: a scalar field
//        satisfies w(-theta, phi) = w(theta, phi + pi), which on this grid is
//        an exact index shift (ghost row j=-1 is row 0 with columns shifted
//        by n_phi/2, and symmetrically at the south pole).
//
// n = 1: a uniform periodic grid theta_k = (k + 1/2) h, h = 2 pi/n_theta,
//        n_theta even so the antipodal map is an exact index shift.
//
// Derivatives are covariant derivatives on the round sphere expressed in the
// orthonormal frame {e_theta, e_phi / sin theta}:
//     g1 = D_theta w
//     g2 = (1/sin theta) D_phi w
//     h11 = w_{;theta theta}
//     h12 = w_{;theta phi-hat} = d_theta[(1/sin theta) d_phi w]
//     h22 = w_{;phi-hat phi-hat} = (1/sin^2 theta) d_phi^2 w + cot theta d_theta w
// For n=1 only g1 (= w') and h11 (= w'') are populated.
//
// The kernel is built from three-point centred stencils but is uniformly
// second-order accurate *including the pole-adjacent rows*, which requires
// three ingredients (each exact, not asymptotic):
//   1. azimuthal differences use trigonometric denominators, 2 sin(h_phi)
//      and 4 sin^2(h_phi/2), which differentiate the m = +-1 azimuthal modes
//      exactly -- those are the modes whose truncation error a plain stencil
//      amplifies by 1/sin theta into an O(h) pole error;
//   2. the field is split into its ring mean and fluctuation, w = mu(theta)
//      + w', so the zonal part of h22 is computed as cot(theta) d_theta mu
//      with no 1/sin^2 division at all;
//   3. the remaining 1/sin^2-free forms come from the exact identities
//         h12 = d_theta[(1/sin theta) d_phi w]
//         h22 = cot(theta) d_theta mu
//               + [(d_phi^2 + 1) w'] / sin^2 theta + d_theta[w' cot theta]
//      whose intermediate fields are odd across the pole and get
//      sign-flipped ghost rows; (d_phi^2 + 1) with the trigonometric
//      denominator annihilates the m = +-1 modes exactly, cancelling the
//      1/sin^2 amplification.

#include <array>
#include <vector>

namespace curvflow {

struct Grid {
  int n = 2;        // sphere dimension, 1 or 2
  int n_theta = 0;  // rows (n=2) / nodes (n=1)
  int n_phi = 1;    // columns (n=2); 1 for n=1
  double h_theta = 0;
  double h_phi = 0;

  // Per-row trigonometry (n=2) or per-node (n=1).
  std::vector<double> theta, sin_theta, cos_theta, cot_theta;
  // Node coordinates on the unit sphere: n=2 (x,y,z); n=1 (x,y), z=0.
  std::vector<double> x1, x2, x3;
  // Quadrature weights per node; sum is exactly the sphere area |S^n|
  // (renormalized), so constants integrate exactly.
  std::vector<double> weight;
  // Antipodal index map (exact on this grid).
  std::vector<int> antipode;

  double area = 0;  // |S^n|: 2*pi (n=1) or 4*pi (n=2)

  int size() const { return n_theta * n_phi; }
  int index(int j, int k) const { return j * n_phi + k; }

  // Smallest node spacing: pole-aware value (correct stability bound for
  // arbitrary fields) and the zonal value min(h_theta, h_phi), valid when
  // the evolved field is constant along rings -- ring-constancy is an exact
  // floating-point invariant of the derivative kernel, so zonal runs may
  // use the much larger zonal bound.
  double min_spacing_pole_aware() const;
  double min_spacing_zonal() const;

  // n=1: n_theta even >= 8 (n_phi ignored). n=2: n_theta >= 4 and n_phi even
  // >= 8. Throws ConfigError otherwise.
  static Grid make(int n, int n_theta, int n_phi = 0);
};

// Derivative fields, one value per node. Unused components (n=1) are
// zero-filled.
struct Deriv {
  std::vector<double> g1, g2, h11, h12, h22;
  void resize(int count);
};

// Scratch buffers reused between differentiate() calls on the same grid.
struct DerivWorkspace {
  std::vector<double> mu;    // ring means, one per row
  std::vector<double> wp;    // fluctuation w - mu
  std::vector<double> vc;    // w' * cot(theta)
};

// Covariant gradient and Hessian of w in the orthonormal frame. Node maps
// are parallel; the per-row ring means are serial within each row, so the
// result is identical for any thread count.
void differentiate(const Grid& g, const std::vector<double>& w, Deriv& out,
                   DerivWorkspace& ws);

// Quadrature: sum of f * weight in node order (serial, deterministic).
double integrate(const Grid& g, const std::vector<double>& f);

}  // namespace curvflow
