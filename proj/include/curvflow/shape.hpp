#pragma once

// Shape representations of a closed star-shaped hypersurface M in R^{n+1}
// containing the origin, and the geometric caches the flows evolve.
//
// Radial representation: M = { rho(xi) xi : xi in S^n }. With gamma = log rho
// the first fundamental quantities are omega = sqrt(1 + |D gamma|^2) and the
// support value at the point rho(xi) xi is u = rho/omega. The Weingarten map
// has the same eigenvalues as the symmetric matrix
//     (I - B^{1/2} (Hess gamma) B^{1/2}) / (rho omega),
// where B^{1/2} = I + (1/omega - 1) gh ghT and gh = D gamma/|D gamma|; the
// principal curvatures are kappa_i = (1 - eig_i)/(rho omega).
//
// Support representation (convex M): u(x) is the support function on the
// outer normal sphere, A = Hess u + u I is positive definite with eigenvalues
// the principal curvature radii lam_i = 1/kappa_i, det A = 1/K (inverse Gauss
// curvature) and the contact point of the supporting plane with normal x has
// distance rho = sqrt(u^2 + |Du|^2) from the origin. The change of variables
// from the normal parametrization to the radial one has Jacobian
// u det A / rho^{n+1}.

#include <array>
#include <vector>

#include "curvflow/grid.hpp"

namespace curvflow {

struct RadialGeometry {
  std::vector<double> rho, gamma;
  Deriv d;                     // derivatives of gamma
  std::vector<double> grad2;   // |D gamma|^2
  std::vector<double> omega;   // sqrt(1 + |D gamma|^2)
  std::vector<double> u;       // rho / omega
  std::vector<double> kappa1, kappa2;  // principal curvatures, kappa1 <= kappa2

  // Build all caches from rho (positive; throws NumericalError otherwise).
  void build(const Grid& g, const std::vector<double>& rho_in);

 private:
  DerivWorkspace ws_;
};

struct SupportGeometry {
  std::vector<double> u;
  Deriv d;                     // derivatives of u
  std::vector<double> rho;     // sqrt(u^2 + |Du|^2)
  std::vector<double> a11, a12, a22;   // A = Hess u + u I (a12,a22 unused n=1)
  std::vector<double> lam1, lam2;      // eigenvalues of A, lam1 <= lam2
  std::vector<double> det_a;           // sigma_n(lam)

  // Build all caches from u (positive; throws NumericalError otherwise).
  // Does not require convexity; callers check lam1 > 0 where needed.
  void build(const Grid& g, const std::vector<double>& u_in);

 private:
  DerivWorkspace ws_;
};

// Anisotropy weight psi on the sphere, psi = base^power with
//   constant : base = value
//   linear   : base = value + c <x, axis>
//   quadratic: base = value + sum_t a_t <x, e_t>^2   (up to 3 terms)
// linear is not even; constant and quadratic are. Pointwise positivity of the
// base is validated exactly (quadratic: via the eigenvalue range of the
// summed coefficient matrix). Zonal specs (every direction parallel to the
// polar axis, n=2) are evaluated from per-row data only, so the values are
// bitwise ring-constant. The power (default 1) lets the stationary solvers
// hand a flow the transformed weight base^{-beta/k} without losing the
// closed-form structure.
struct PsiSpec {
  enum class Kind { constant, linear, quadratic };
  struct QuadTerm {
    std::array<double, 3> axis{0.0, 0.0, 1.0};
    double a = 0.0;
  };
  Kind kind = Kind::constant;
  double value = 1.0;  // constant value, or the offset c0 of the other kinds
  double c = 0.0;      // linear amplitude
  std::array<double, 3> axis{0.0, 0.0, 1.0};  // linear direction
  std::vector<QuadTerm> terms;                // quadratic terms
  double power = 1.0;

  void validate(int n) const;      // positivity etc.; throws ConfigError
  bool is_constant_one() const;
  bool is_even() const { return kind != Kind::linear || c == 0.0; }
  bool is_zonal(int n) const;
  void evaluate(const Grid& g, std::vector<double>& out) const;
  double min_value(int n) const;   // exact infimum over the sphere
  // Same weight raised to a further power: (base^power)^e = base^{power*e}.
  PsiSpec raised(double e) const;
};

// Initial shape catalogue.
//   ball          rho = u = radius
//   offset_ball   ball of given radius centred at `center`, |center| < radius
//   radial_graph  rho = radius + c <xi, axis> (star-shaped; not necessarily
//                 convex -- the support evaluation goes through the numeric
//                 envelope below and will reject non-convex instances)
//   zonal_mode    rho = radius + c P_mode(cos theta) (n=2, Legendre mode);
//                 rho = radius + c cos(mode * theta) for n=1
//   ellipsoid     semi-axes (a,b,c) aligned with the coordinate axes
// For n=1 the third component of vectors/axes is ignored.
struct ShapeSpec {
  enum class Kind { ball, offset_ball, radial_graph, zonal_mode, ellipsoid };
  Kind kind = Kind::ball;
  double radius = 1.0;
  double c = 0.0;
  int mode = 2;  // zonal_mode wavenumber
  std::array<double, 3> center{0.0, 0.0, 0.0};
  std::array<double, 3> axis{0.0, 0.0, 1.0};
  std::array<double, 3> semi_axes{1.0, 1.0, 1.0};

  void validate(int n) const;  // throws ConfigError
  bool is_zonal(int n) const;  // rotationally symmetric about the polar axis
                               // AND evaluated bitwise ring-constant
  // Radial function rho(xi) on the grid.
  void radial(const Grid& g, std::vector<double>& rho) const;
  // Support function u(x) on the grid (closed forms where available,
  // numeric envelope otherwise; throws NumericalError if not convex).
  void support(const Grid& g, std::vector<double>& u) const;
};

// Support function of the star body with radial function rho, computed as
// u(x) = max_xi rho(xi) <xi, x> by scanning the grid and refining the
// maximizer with one local quadratic fit. Throws NumericalError (reporting
// the offending value) if the resulting support function is not uniformly
// convex on the grid.
std::vector<double> support_from_radial(const Grid& g,
                                        const std::vector<double>& rho);

}  // namespace curvflow
