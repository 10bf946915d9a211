#include "doctest.h"

#include <cmath>
#include <vector>

#include "curvflow/errors.hpp"
#include "curvflow/grid.hpp"
#include "curvflow/shape.hpp"

#include "oracle_helpers.hpp"

// Shape catalogue and geometry caches against closed forms: balls, offset
// balls, ellipsoids, the radial <-> support envelope, and Gauss-Bonnet.

using namespace curvflow;

namespace {

constexpr double kPi = 3.14159265358979323846;

ShapeSpec ball(double r) {
  ShapeSpec s;
  s.kind = ShapeSpec::Kind::ball;
  s.radius = r;
  return s;
}

ShapeSpec ellipsoid(double a, double b, double c) {
  ShapeSpec s;
  s.kind = ShapeSpec::Kind::ellipsoid;
  s.semi_axes = {a, b, c};
  return s;
}

}  // namespace

TEST_SUITE("shape") {

TEST_CASE("round sphere: both representations, all caches") {
  const Grid g = Grid::make(2, 32, 64);
  const double r = 1.25;  // exactly representable
  std::vector<double> f;
  ball(r).radial(g, f);
  RadialGeometry rg;
  rg.build(g, f);
  for (int i = 0; i < g.size(); ++i) {
    REQUIRE(rg.rho[i] == r);
    REQUIRE(rg.omega[i] == 1.0);
    REQUIRE(rg.u[i] == r);
    REQUIRE(rg.kappa1[i] == doctest::Approx(1.0 / r).epsilon(1e-11));
    REQUIRE(rg.kappa2[i] == doctest::Approx(1.0 / r).epsilon(1e-11));
  }
  ball(r).support(g, f);
  SupportGeometry sg;
  sg.build(g, f);
  for (int i = 0; i < g.size(); ++i) {
    REQUIRE(sg.rho[i] == doctest::Approx(r).epsilon(1e-13));
    REQUIRE(sg.lam1[i] == doctest::Approx(r).epsilon(1e-11));
    REQUIRE(sg.lam2[i] == doctest::Approx(r).epsilon(1e-11));
    REQUIRE(sg.det_a[i] == doctest::Approx(r * r).epsilon(1e-11));
  }
}

TEST_CASE("offset ball: support is linear, curvature is translation-invariant") {
  const Grid g = Grid::make(2, 24, 48);
  ShapeSpec s;
  s.kind = ShapeSpec::Kind::offset_ball;
  s.radius = 1.0;
  s.center = {0.2, -0.1, 0.15};
  std::vector<double> u;
  s.support(g, u);
  SupportGeometry sg;
  sg.build(g, u);
  for (int i = 0; i < g.size(); ++i) {
    const double lin = 1.0 + 0.2 * g.x1[i] - 0.1 * g.x2[i] + 0.15 * g.x3[i];
    REQUIRE(u[i] == doctest::Approx(lin).epsilon(1e-14));
    // translations do not change the principal radii; the discrete Hessian
    // carries the usual O(h^2) truncation (~8e-4 at 24 x 48)
    REQUIRE(sg.lam1[i] == doctest::Approx(1.0).epsilon(2e-3));
    REQUIRE(sg.lam2[i] == doctest::Approx(1.0).epsilon(2e-3));
    // contact distance: |center + radius x|
    const double cx = 0.2 + g.x1[i], cy = -0.1 + g.x2[i],
                 cz = 0.15 + g.x3[i];
    REQUIRE(sg.rho[i] ==
            doctest::Approx(std::sqrt(cx * cx + cy * cy + cz * cz))
                .epsilon(5e-4));
  }
  // the radial function of the same body, via the quadratic formula
  std::vector<double> rho;
  s.radial(g, rho);
  for (int i = 0; i < g.size(); ++i) {
    const double b = 0.2 * g.x1[i] - 0.1 * g.x2[i] + 0.15 * g.x3[i];
    const double c2 = 0.2 * 0.2 + 0.1 * 0.1 + 0.15 * 0.15;
    REQUIRE(rho[i] ==
            doctest::Approx(b + std::sqrt(1.0 - c2 + b * b)).epsilon(1e-13));
  }
}

TEST_CASE("offset ball must contain the origin") {
  ShapeSpec s;
  s.kind = ShapeSpec::Kind::offset_ball;
  s.radius = 0.5;
  s.center = {0.6, 0.0, 0.0};
  REQUIRE_THROWS_AS(s.validate(2), ConfigError);
}

TEST_CASE("ellipsoid support function is the closed form") {
  const Grid g = Grid::make(2, 16, 32);
  std::vector<double> u;
  ellipsoid(1.0, 1.15, 1.4).support(g, u);
  for (int i = 0; i < g.size(); ++i)
    REQUIRE(u[i] == doctest::Approx(testutil::ellipsoid_support(
                        1.0, 1.15, 1.4, g.x1[i], g.x2[i], g.x3[i]))
                        .epsilon(1e-14));
}

TEST_CASE("ellipsoid curvature cache against the closed forms") {
  const Grid g = Grid::make(2, 48, 96);
  std::vector<double> u;
  ellipsoid(1.0, 1.15, 1.35).support(g, u);
  SupportGeometry sg;
  sg.build(g, u);
  double worst_det = 0.0, worst_rho = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    const double det = testutil::ellipsoid_det_a(1.0, 1.15, 1.35, g.x1[i],
                                                 g.x2[i], g.x3[i]);
    const double rho = testutil::ellipsoid_contact_rho(1.0, 1.15, 1.35,
                                                       g.x1[i], g.x2[i],
                                                       g.x3[i]);
    worst_det = std::max(worst_det, std::abs(sg.det_a[i] - det) / det);
    worst_rho = std::max(worst_rho, std::abs(sg.rho[i] - rho) / rho);
  }
  REQUIRE(worst_det < 5e-3);
  REQUIRE(worst_rho < 5e-4);
}

TEST_CASE("radial modes evaluate their formulas") {
  const Grid g = Grid::make(2, 16, 32);
  // linear graph rho = r + c <xi, e>
  ShapeSpec s;
  s.kind = ShapeSpec::Kind::radial_graph;
  s.radius = 1.0;
  s.c = 0.25;
  s.axis = {0.6, 0.0, 0.8};
  std::vector<double> rho;
  s.radial(g, rho);
  for (int i = 0; i < g.size(); ++i)
    REQUIRE(rho[i] == doctest::Approx(1.0 + 0.25 * (0.6 * g.x1[i] +
                                                    0.8 * g.x3[i]))
                          .epsilon(1e-15));
  // zonal Legendre mode: P_2(t) = (3 t^2 - 1)/2
  s.kind = ShapeSpec::Kind::zonal_mode;
  s.mode = 2;
  s.c = 0.1;
  s.radial(g, rho);
  for (int i = 0; i < g.size(); ++i) {
    const double t = g.x3[i];
    REQUIRE(rho[i] ==
            doctest::Approx(1.0 + 0.1 * 0.5 * (3.0 * t * t - 1.0))
                .epsilon(1e-14));
  }
  // circle: cos(mode theta)
  const Grid c1 = Grid::make(1, 32);
  s.mode = 3;
  s.radial(c1, rho);
  for (int i = 0; i < c1.size(); ++i)
    REQUIRE(rho[i] == doctest::Approx(1.0 + 0.1 * std::cos(3.0 * c1.theta[i]))
                          .epsilon(1e-14));
}

TEST_CASE("support envelope recovers closed forms") {
  const Grid g = Grid::make(2, 32, 64);
  // the radial function of the axis-aligned ellipsoid is
  // rho(xi) = (sum xi_i^2 / a_i^2)^{-1/2}
  std::vector<double> rho(g.size());
  for (int i = 0; i < g.size(); ++i)
    rho[i] = 1.0 / std::sqrt(g.x1[i] * g.x1[i] / (1.0 * 1.0) +
                             g.x2[i] * g.x2[i] / (1.0 * 1.0) +
                             g.x3[i] * g.x3[i] / (1.3 * 1.3));
  const std::vector<double> u = support_from_radial(g, rho);
  double worst = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    const double exact = testutil::ellipsoid_support(1.0, 1.0, 1.3, g.x1[i],
                                                     g.x2[i], g.x3[i]);
    worst = std::max(worst, std::abs(u[i] - exact) / exact);
  }
  REQUIRE(worst < 1e-2);
}

TEST_CASE("support of a non-convex star shape is rejected") {
  const Grid g = Grid::make(2, 16, 32);
  ShapeSpec s;
  s.kind = ShapeSpec::Kind::zonal_mode;
  s.radius = 1.0;
  s.c = 0.45;  // deep wells: star-shaped but far from convex
  s.mode = 3;
  std::vector<double> u;
  REQUIRE_THROWS_AS(s.support(g, u), NumericalError);
}

TEST_CASE("total Gauss curvature of star shapes is 4 pi") {
  // int kappa_1 kappa_2 dA with dA = rho^2 omega dxi -- topological, so it
  // must hold for any closed star-shaped surface, not just convex ones
  const Grid g = Grid::make(2, 48, 96);
  ShapeSpec s;
  s.kind = ShapeSpec::Kind::zonal_mode;
  s.radius = 1.0;
  s.c = 0.15;
  s.mode = 3;
  std::vector<double> rho;
  s.radial(g, rho);
  RadialGeometry rg;
  rg.build(g, rho);
  std::vector<double> f(g.size());
  for (int i = 0; i < g.size(); ++i)
    f[i] = rg.kappa1[i] * rg.kappa2[i] * rho[i] * rho[i] * rg.omega[i];
  REQUIRE(integrate(g, f) == doctest::Approx(4.0 * kPi).epsilon(5e-3));
}

TEST_CASE("radial geometry support value never exceeds the radius") {
  const Grid g = Grid::make(2, 24, 48);
  ShapeSpec s;
  s.kind = ShapeSpec::Kind::radial_graph;
  s.radius = 1.0;
  s.c = 0.3;
  s.axis = {0.0, 0.0, 1.0};
  std::vector<double> rho;
  s.radial(g, rho);
  RadialGeometry rg;
  rg.build(g, rho);
  for (int i = 0; i < g.size(); ++i) {
    REQUIRE(rg.u[i] <= rho[i] + 1e-15);
    REQUIRE(rg.omega[i] >= 1.0);
    REQUIRE(rg.u[i] == doctest::Approx(rho[i] / rg.omega[i]).epsilon(1e-15));
  }
}

TEST_CASE("zonal flags") {
  ShapeSpec s = ball(1.0);
  REQUIRE(s.is_zonal(2));
  s.kind = ShapeSpec::Kind::zonal_mode;
  REQUIRE(s.is_zonal(2));
  s.kind = ShapeSpec::Kind::radial_graph;
  s.c = 0.2;
  s.axis = {0.0, 0.0, 1.0};
  REQUIRE(s.is_zonal(2));  // polar-axis graph is rotationally symmetric
  s.axis = {0.6, 0.0, 0.8};
  REQUIRE_FALSE(s.is_zonal(2));
  s.kind = ShapeSpec::Kind::ellipsoid;
  s.semi_axes = {1.0, 1.0, 1.3};
  REQUIRE(s.is_zonal(2));
  s.semi_axes = {1.0, 1.1, 1.3};
  REQUIRE_FALSE(s.is_zonal(2));
}

TEST_CASE("spec validation rejects degenerate shapes") {
  ShapeSpec s = ball(-1.0);
  REQUIRE_THROWS_AS(s.validate(2), ConfigError);
  s = ellipsoid(1.0, 0.0, 1.0);
  REQUIRE_THROWS_AS(s.validate(2), ConfigError);
  s = ball(1.0);
  s.kind = ShapeSpec::Kind::radial_graph;
  s.c = 1.5;  // rho would change sign
  REQUIRE_THROWS_AS(s.validate(2), ConfigError);
}

}  // TEST_SUITE
