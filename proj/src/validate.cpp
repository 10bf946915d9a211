#include "curvflow/validate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "curvflow/curvature.hpp"
#include "curvflow/errors.hpp"
#include "curvflow/exact.hpp"
#include "curvflow/flow.hpp"
#include "curvflow/functionals.hpp"
#include "curvflow/grid.hpp"
#include "curvflow/minkowski.hpp"
#include "curvflow/numeric.hpp"
#include "curvflow/parallel.hpp"
#include "curvflow/shape.hpp"

namespace curvflow {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.6g", v);
  return b;
}

struct Suite {
  std::vector<CheckResult> rows;

  // One check: body fills detail and returns the measured value; pass iff
  // finite and <= bound. A throw fails the row with the message as detail.
  template <class F>
  void run(const std::string& name, double bound, F&& body) {
    CheckResult r;
    r.name = name;
    r.bound = bound;
    const auto t0 = Clock::now();
    try {
      r.measured = body(r.detail);
      r.pass = std::isfinite(r.measured) && r.measured <= bound;
    } catch (const std::exception& e) {
      r.measured = std::numeric_limits<double>::infinity();
      r.pass = false;
      r.detail = std::string("threw: ") + e.what();
    }
    r.seconds = seconds_since(t0);
    rows.push_back(std::move(r));
  }
};

// Central difference with one Richardson step: O(h^4) for smooth f.
template <class F>
double richardson(F&& f, double x, double h) {
  const double d1 = (f(x + h) - f(x - h)) / (2.0 * h);
  const double d2 = (f(x + 0.5 * h) - f(x - 0.5 * h)) / h;
  return (4.0 * d2 - d1) / 3.0;
}

CurvatureSpec spec_sigma_root(int k, CurvatureArgument arg) {
  CurvatureSpec s;
  s.kind = CurvatureKind::sigma_k_root;
  s.argument = arg;
  s.k = k;
  return s;
}

// Restores the global thread override when a check body unwinds.
struct ThreadGuard {
  ~ThreadGuard() { par::set_thread_override(0); }
};

// ---------------------------------------------------------------------------
// quick: closed-form ball solutions
// ---------------------------------------------------------------------------

void check_exact(Suite& s) {
  s.run("exact.ball-exponential-branch", 1e-14, [](std::string& d) {
    const double got = exact::ball_radius(1.3, 0.7, 1.0, 1.0);
    const double want = 1.3 * std::exp(0.7);
    d = "sigma=1: " + num(got) + " vs " + num(want);
    return std::abs(got - want) / want;
  });

  s.run("exact.ball-power-branches", 1e-14, [](std::string& d) {
    // sigma=0 grows linearly, sigma=2 is the reciprocal-of-linear branch.
    const double lin = exact::ball_radius(1.0, 2.0, 1.0, 0.0);   // 1 + t = 3
    const double sup = exact::ball_radius(1.0, 0.5, 1.0, 2.0);   // 1/(1-t) = 2
    d = "sigma=0 -> " + num(lin) + ", sigma=2 -> " + num(sup);
    return std::max(std::abs(lin - 3.0) / 3.0, std::abs(sup - 2.0) / 2.0);
  });

  s.run("exact.ball-initial-value", 1e-14, [](std::string&) {
    double worst = 0.0;
    for (double sig : {-1.5, 0.0, 0.5, 1.0, 2.0, 3.2})
      for (double r0 : {0.3, 1.0, 2.7})
        for (double eta : {0.5, 2.0})
          worst = std::max(
              worst, std::abs(exact::ball_radius(r0, 0.0, eta, sig) - r0) / r0);
    return worst;
  });

  s.run("exact.ball-ode-residual", 1e-8, [](std::string& d) {
    // dr/dt = eta r^sigma, checked by Richardson differentiation in t.
    std::mt19937_64 rng(20240817);
    std::uniform_real_distribution<double> ur(0.5, 2.0), ut(0.0, 1.0);
    const double sigmas[] = {-1.0, 0.0, 0.5, 1.0, 1.8, 2.5};
    const double etas[] = {0.7, 1.0, 1.6};
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const double sig = sigmas[i % 6];
      const double eta = etas[i % 3];
      const double r = ur(rng);
      double t = 0.2 + 1.3 * ut(rng);
      if (sig > 1.0) t = 0.5 * ut(rng) * exact::blow_up_time(r, eta, sig);
      const double h = 1e-4 * std::max(1.0, t);
      if (t < h) t = h;
      const double lhs = richardson(
          [&](double tt) { return exact::ball_radius(r, tt, eta, sig); }, t, h);
      const double rhs = eta * pow_fast(exact::ball_radius(r, t, eta, sig), sig);
      worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, rhs));
    }
    d = "20 interior points, all branches";
    return worst;
  });

  s.run("exact.blow-up-time", 1e-12, [](std::string& d) {
    const double t1 = exact::blow_up_time(1.0, 1.0, 2.0);   // 1
    const double t2 = exact::blow_up_time(2.0, 0.5, 3.0);   // 2^{-2}/(2*0.5)
    const double near = exact::ball_radius(1.0, t1 * (1.0 - 1e-6), 1.0, 2.0);
    d = "T*=" + num(t1) + ", r near T* = " + num(near);
    double worst = std::max(std::abs(t1 - 1.0), std::abs(t2 - 0.25));
    if (!(near > 1e5)) worst = std::max(worst, 1.0);  // must diverge
    return worst;
  });

  s.run("exact.stretched-time-schedule", 1e-12, [](std::string& d) {
    // phi(t) = exp(eta * tau(t)) ties the schedule to the stretched time.
    double worst = 0.0;
    for (double sig : {0.0, 0.5, 1.0, 1.7, 2.5})
      for (double eta : {1.0, 2.0})
        for (int i = 1; i <= 8; ++i) {
          double t = 0.2 * i;
          if (sig > 1.0) t = 0.1 * i * exact::blow_up_time(1.0, eta, sig);
          const double phi = exact::phi_schedule(t, eta, sig);
          const double via_tau = std::exp(eta * exact::tau_of_t(t, eta, sig));
          worst = std::max(worst, std::abs(phi - via_tau) / phi);
        }
    d = "phi(t) = exp(eta tau(t)) across branches";
    return worst;
  });
}

// ---------------------------------------------------------------------------
// quick: exponent dictionary
// ---------------------------------------------------------------------------

void check_exponents(Suite& s) {
  s.run("exponents.round-trip", 1e-12, [](std::string& d) {
    double worst = 0.0;
    for (int n : {1, 2})
      for (double a : {-2.0, -0.5, 0.0, 1.3})
        for (double dl : {-1.0, 0.0, 0.7})
          for (double b : {0.5, 1.0, 2.0}) {
            worst = std::max(
                worst, std::abs(alpha_from_p(n, p_exponent(n, a, b), b) - a));
            worst = std::max(
                worst, std::abs(delta_from_q(n, q_exponent(n, dl, b), b) - dl));
          }
    d = "p(2,0,1)=" + num(p_exponent(2, 0, 1)) +
        ", q(2,0,1)=" + num(q_exponent(2, 0, 1));
    return worst;
  });

  s.run("exponents.dual-branches", 1e-12, [](std::string& d) {
    double worst = 0.0;
    // finite branches
    const double cases[][2] = {{2.0, 4.0}, {3.0, 3.0}, {4.0, 2.0},
                               {8.0, 4.0 / 3.0}, {1.5, 6.0}};
    for (auto& c : cases) worst = std::max(worst, std::abs(q_star(2, c[0]) - c[1]));
    if (!std::isinf(q_star(2, 0.5))) worst = std::max(worst, 1.0);
    if (!std::isinf(q_star(2, 1.0))) worst = std::max(worst, 1.0);
    if (!std::isnan(q_star(2, 0.0))) worst = std::max(worst, 1.0);
    if (!std::isnan(q_star(2, -1.0))) worst = std::max(worst, 1.0);
    d = "poles, plateau and both power branches";
    return worst;
  });
}

// ---------------------------------------------------------------------------
// quick: curvature families
// ---------------------------------------------------------------------------

void check_curvature(Suite& s) {
  s.run("curvature.sigma-k-enumeration", 1e-12, [](std::string& d) {
    // explicit sums/products against the library values, 10^4 tuples
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const double l1 = u(rng), l2 = u(rng);
      worst = std::max(worst,
                       std::abs(sigma_k(2, 1, l1, l2) - (l1 + l2)) / (l1 + l2));
      worst = std::max(worst,
                       std::abs(sigma_k(2, 2, l1, l2) - l1 * l2) / (l1 * l2));
      worst = std::max(worst, std::abs(sigma_k(1, 1, l1, 0.0) - l1) / l1);
      worst = std::max(worst, std::abs(sigma_k(2, 0, l1, l2) - 1.0));
    }
    d = "sigma_0..sigma_2, 10^4 tuples";
    return worst;
  });

  struct Family {
    CurvatureSpec spec;
    int n;
    const char* label;
  };
  std::vector<Family> fams;
  fams.push_back({spec_sigma_root(1, CurvatureArgument::principal_curvatures),
                  2, "sigma_1"});
  fams.push_back({spec_sigma_root(2, CurvatureArgument::principal_curvatures),
                  2, "sigma_2^{1/2}"});
  {
    CurvatureSpec q;
    q.kind = CurvatureKind::quotient;
    q.k = 1;
    q.l = 2;
    fams.push_back({q, 2, "sigma_2/sigma_1"});
  }
  {
    CurvatureSpec p;
    p.kind = CurvatureKind::power_mean;
    p.m = -1.0;
    fams.push_back({p, 2, "harmonic mean"});
  }
  fams.push_back({spec_sigma_root(1, CurvatureArgument::principal_curvatures),
                  1, "sigma_1 (n=1)"});

  s.run("curvature.gradient-vs-fd", 1e-7, [&](std::string& d) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.4, 2.5);
    double worst = 0.0;
    for (const auto& fam : fams)
      for (int i = 0; i < 20; ++i) {
        const double l1 = u(rng), l2 = fam.n == 2 ? u(rng) : 0.0;
        const CurvatureEval ev = eval_curvature(fam.spec, fam.n, l1, l2);
        const double fd1 = richardson(
            [&](double x) { return eval_curvature(fam.spec, fam.n, x, l2).f; },
            l1, 1e-3);
        worst = std::max(worst, std::abs(ev.df1 - fd1));
        if (fam.n == 2) {
          const double fd2 = richardson(
              [&](double x) {
                return eval_curvature(fam.spec, fam.n, l1, x).f;
              },
              l2, 1e-3);
          worst = std::max(worst, std::abs(ev.df2 - fd2));
        }
      }
    d = "3 families + quotient/power mean, 20 points each";
    return worst;
  });

  s.run("curvature.euler-homogeneity", 1e-10, [&](std::string& d) {
    // 1-homogeneity: lam . grad f = f on the cone
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> u(0.4, 2.5);
    double worst = 0.0;
    for (const auto& fam : fams)
      for (int i = 0; i < 20; ++i) {
        const double l1 = u(rng), l2 = fam.n == 2 ? u(rng) : 0.0;
        const CurvatureEval ev = eval_curvature(fam.spec, fam.n, l1, l2);
        worst = std::max(worst, std::abs(l1 * ev.df1 + l2 * ev.df2 - ev.f) /
                                    std::max(1.0, ev.f));
      }
    d = "lam . grad f = f";
    return worst;
  });

  s.run("curvature.unit-normalizers", 1e-14, [&](std::string& d) {
    double worst = 0.0;
    worst = std::max(worst, std::abs(eta_lambda(2, 1, 1.0) - 2.0));
    worst = std::max(worst, std::abs(eta_lambda(2, 1, 2.0) - 4.0));
    worst = std::max(worst, std::abs(eta_lambda(2, 2, 2.0) - 1.0));
    worst = std::max(worst, std::abs(eta_lambda(1, 1, 3.0) - 1.0));
    worst = std::max(worst, std::abs(eta_kappa(fams[0].spec, 2, 1.0) - 0.5));
    worst = std::max(worst, std::abs(eta_kappa(fams[1].spec, 2, 1.0) - 1.0));
    worst = std::max(worst, std::abs(eta_kappa(fams[2].spec, 2, 2.0) - 4.0));
    worst = std::max(worst, std::abs(eta_kappa(fams[3].spec, 2, 1.0) - 1.0));
    d = "unit-sphere speeds, both conventions";
    return worst;
  });
}

// ---------------------------------------------------------------------------
// quick: circle grid and shapes (n = 1)
// ---------------------------------------------------------------------------

void check_circle_grid(Suite& s) {
  s.run("grid.circle-quadrature", 1e-12, [](std::string& d) {
    const Grid g = Grid::make(1, 256);
    std::vector<double> one(g.size(), 1.0), cs(g.size());
    for (int i = 0; i < g.size(); ++i) cs[i] = g.x1[i] * g.x1[i];
    const double pi = std::acos(-1.0);
    const double e0 = std::abs(integrate(g, one) - 2.0 * pi);
    const double e1 = std::abs(integrate(g, cs) - pi);
    d = "circumference exact, cos^2 to rounding";
    return std::max(e0, e1);
  });

  // three-point stencils on cos(3 theta): second order, ratio ~ 4
  const auto stencil_error = [](int nn) {
    const Grid g = Grid::make(1, nn);
    std::vector<double> w(g.size());
    for (int i = 0; i < g.size(); ++i) w[i] = std::cos(3.0 * g.theta[i]);
    Deriv dv;
    dv.resize(g.size());
    DerivWorkspace ws;
    differentiate(g, w, dv, ws);
    double eg = 0.0, eh = 0.0;
    for (int i = 0; i < g.size(); ++i) {
      eg = std::max(eg, std::abs(dv.g1[i] + 3.0 * std::sin(3.0 * g.theta[i])));
      eh = std::max(eh, std::abs(dv.h11[i] + 9.0 * w[i]));
    }
    return std::pair<double, double>(eg, eh);
  };
  const auto [eg_c, eh_c] = stencil_error(128);
  const auto [eg_f, eh_f] = stencil_error(256);

  s.run("grid.circle-derivative-error", 6e-3, [&](std::string& d) {
    d = "gradient " + num(eg_f) + ", hessian " + num(eh_f) + " at N=256";
    return std::max(eg_f, eh_f / 3.0);
  });
  s.run("grid.circle-stencil-order", 0.0, [&](std::string& d) {
    const double ratio = std::min(eg_c / eg_f, eh_c / eh_f);
    d = "halving ratio " + num(ratio) + " (need >= 3.4)";
    return 3.4 - ratio;
  });
}

void check_circle_shapes(Suite& s) {
  s.run("shape.circle-offset-ball-geometry", 1e-4, [](std::string& d) {
    const Grid g = Grid::make(1, 256);
    ShapeSpec sp;
    sp.kind = ShapeSpec::Kind::offset_ball;
    sp.radius = 1.0;
    sp.center = {0.25, 0.1, 0.0};
    std::vector<double> u;
    sp.support(g, u);
    SupportGeometry sg;
    sg.build(g, u);
    const double c2 = 0.25 * 0.25 + 0.1 * 0.1;
    double e_lam = 0.0, e_rho = 0.0;
    for (int i = 0; i < g.size(); ++i) {
      const double cx = 0.25 * g.x1[i] + 0.1 * g.x2[i];
      e_lam = std::max(e_lam, std::abs(sg.lam1[i] - 1.0));
      e_rho = std::max(e_rho,
                       std::abs(sg.rho[i] - std::sqrt(1.0 + 2.0 * cx + c2)));
    }
    d = "principal radius " + num(e_lam) + ", contact distance " + num(e_rho);
    return std::max(e_lam, e_rho);
  });

  s.run("shape.circle-support-envelope", 1e-4, [](std::string& d) {
    const Grid g = Grid::make(1, 256);
    // ball: envelope must reproduce the constant support function
    std::vector<double> rho(g.size(), 1.7);
    std::vector<double> ub = support_from_radial(g, rho);
    double e_ball = 0.0;
    for (double v : ub) e_ball = std::max(e_ball, std::abs(v - 1.7));
    // offset ball: compare against the linear closed form
    ShapeSpec sp;
    sp.kind = ShapeSpec::Kind::offset_ball;
    sp.radius = 1.0;
    sp.center = {0.2, -0.15, 0.0};
    sp.radial(g, rho);
    std::vector<double> uo = support_from_radial(g, rho);
    double e_off = 0.0;
    for (int i = 0; i < g.size(); ++i) {
      const double want = 1.0 + 0.2 * g.x1[i] - 0.15 * g.x2[i];
      e_off = std::max(e_off, std::abs(uo[i] - want));
    }
    d = "ball " + num(e_ball) + ", offset ball " + num(e_off);
    return std::max(e_ball, e_off);
  });
}

// ---------------------------------------------------------------------------
// quick: anisotropy weights
// ---------------------------------------------------------------------------

void check_weights(Suite& s) {
  s.run("shape.weight-minimum-exact", 1e-12, [](std::string& d) {
    double worst = 0.0;
    // axis-aligned quadratic: base in [0.8, 1.3]
    PsiSpec q;
    q.kind = PsiSpec::Kind::quadratic;
    q.terms = {PsiSpec::QuadTerm{{0.0, 0.0, 1.0}, 0.3},
               PsiSpec::QuadTerm{{1.0, 0.0, 0.0}, -0.2}};
    worst = std::max(worst, std::abs(q.min_value(2) - 0.8));
    // negative power flips to the maximum of the base
    PsiSpec qp = q.raised(-2.0);
    worst = std::max(worst, std::abs(qp.min_value(2) - std::pow(1.3, -2.0)));
    // rotated +-0.5 pair: eigenvalues +-0.5 off the diagonal
    const double r = 1.0 / std::sqrt(2.0);
    PsiSpec rot;
    rot.kind = PsiSpec::Kind::quadratic;
    rot.terms = {PsiSpec::QuadTerm{{r, r, 0.0}, 0.5},
                 PsiSpec::QuadTerm{{r, -r, 0.0}, -0.5}};
    worst = std::max(worst, std::abs(rot.min_value(2) - 0.5));
    // linear
    PsiSpec lin;
    lin.kind = PsiSpec::Kind::linear;
    lin.c = 0.3;
    worst = std::max(worst, std::abs(lin.min_value(2) - 0.7));
    d = "axis-aligned, rotated and linear cases";
    return worst;
  });

  s.run("shape.weight-minimum-sampled", 1e-2, [](std::string& d) {
    // dense sampling can only sit above the exact infimum, and not by much
    const Grid g = Grid::make(2, 64, 128);
    PsiSpec rot;
    rot.kind = PsiSpec::Kind::quadratic;
    const double r = 1.0 / std::sqrt(2.0);
    rot.terms = {PsiSpec::QuadTerm{{r, r, 0.0}, 0.5},
                 PsiSpec::QuadTerm{{0.3, 0.0, 0.954}, -0.25}};
    std::vector<double> vals;
    rot.evaluate(g, vals);
    double lo = vals[0];
    for (double v : vals) lo = std::min(lo, v);
    const double exact_min = rot.min_value(2);
    d = "sampled " + num(lo) + " vs exact " + num(exact_min);
    if (lo < exact_min - 1e-12) return 1.0;  // sampling below the infimum
    return lo - exact_min;
  });

  s.run("functionals.anisotropy-condition-circle", 1e-12, [](std::string& d) {
    const Grid g = Grid::make(1, 256);
    PsiSpec one;
    const PsiConditionReport rep = check_psi_condition(g, one, -1.0, 1.0);
    double worst = std::max(std::abs(rep.min_eig - 1.0),
                            std::abs(rep.max_eig - 1.0));
    if (!rep.positive_definite) worst = std::max(worst, 1.0);
    PsiSpec lin;
    lin.kind = PsiSpec::Kind::linear;
    lin.c = 0.2;
    lin.axis = {1.0, 0.0, 0.0};
    if (!check_psi_condition(g, lin, -1.0, 1.0).positive_definite)
      worst = std::max(worst, 1.0);
    bool threw = false;
    try {
      check_psi_condition(g, one, 2.0, 1.0);  // 1 + beta - alpha = 0
    } catch (const ConfigError&) {
      threw = true;
    }
    if (!threw) worst = std::max(worst, 1.0);
    d = "flat weight eigenvalue 1; singular exponent rejected";
    return worst;
  });
}

// ---------------------------------------------------------------------------
// quick: circle flows and solver
// ---------------------------------------------------------------------------

FlowParams circle_flow(FlowVariant v) {
  FlowParams P;
  P.variant = v;
  P.n = 1;
  P.n_theta = 128;
  P.alpha = 0.0;
  P.delta = 0.0;
  P.beta = 1.0;
  if (is_radial(v)) {
    P.curvature = spec_sigma_root(1, CurvatureArgument::principal_curvatures);
  } else {
    P.curvature = spec_sigma_root(1, CurvatureArgument::principal_radii);
  }
  P.initial.kind = ShapeSpec::Kind::ball;
  P.initial.radius = 1.0;
  return P;
}

double history_unit_drift(const FlowResult& R) {
  double worst = 0.0;
  for (const FlowRecord& r : R.history) {
    worst = std::max(worst, std::abs(r.min_rho - 1.0));
    worst = std::max(worst, std::abs(r.max_rho - 1.0));
  }
  for (double v : R.field) worst = std::max(worst, std::abs(v - 1.0));
  return worst;
}

void check_circle_flows(Suite& s) {
  const struct {
    FlowVariant v;
    const char* name;
  } variants[] = {
      {FlowVariant::radial_normalized, "flow.circle-stationary-radial"},
      {FlowVariant::support_normalized_sigma_k, "flow.circle-stationary-sigma-k"},
      {FlowVariant::support_normalized_gauss, "flow.circle-stationary-gauss"},
  };
  for (const auto& c : variants) {
    s.run(c.name, 1e-6, [&](std::string& d) {
      FlowParams P = circle_flow(c.v);
      P.time.max_steps = 1000;
      P.time.record_every = 50;
      const FlowResult R = run_flow(P);
      d = "unit circle, 1000 steps, drift " + num(history_unit_drift(R));
      return history_unit_drift(R);
    });
  }

  s.run("flow.circle-exponential-exact", 1e-6, [](std::string& d) {
    // sigma = 1: the circle radius grows exactly like e^t
    FlowParams P = circle_flow(FlowVariant::radial_original);
    P.time.t_end = 0.25;
    P.time.dt_fixed = 1e-4;
    P.time.record_every = 100;
    const FlowResult R = run_flow(P);
    const double want = std::exp(0.25);
    double got_min = 0.0, got_max = 0.0;
    for (double v : R.field) {
      got_min = got_min == 0.0 ? v : std::min(got_min, v);
      got_max = std::max(got_max, v);
    }
    d = "radius " + num(got_max) + " vs " + num(want);
    return std::max(std::abs(got_min - want), std::abs(got_max - want)) / want;
  });

  s.run("flow.circle-blow-up-estimate", 0.02, [](std::string& d) {
    // dr/dt = r^2 from r = 1 blows up at t = 1
    FlowParams P = circle_flow(FlowVariant::support_original);
    P.beta = 2.0;
    P.stop.blow_up_factor = 120.0;
    const FlowResult R = run_flow(P);
    if (R.verdict != FlowVerdict::blown_up) {
      d = std::string("verdict ") + to_string(R.verdict);
      return 1.0;
    }
    const double t_hat = estimate_blow_up_time(R, 10.0, 100.0);
    d = "estimated " + num(t_hat) + " vs 1 (window [10,100] x r0)";
    return std::abs(t_hat - 1.0);
  });
}

void check_circle_solver(Suite& s) {
  s.run("solve.circle-isotropic-identity", 1e-3, [](std::string& d) {
    // flat weight, p = 3: the unit circle is the unique solution
    MinkowskiProblem prob;
    prob.equation = EquationKind::lp_minkowski;
    prob.n = 1;
    prob.k = 1;
    prob.p = 3.0;
    SolveOptions opt;
    opt.n_theta = 128;
    opt.initial.kind = ShapeSpec::Kind::ellipsoid;
    opt.initial.semi_axes = {1.0, 1.25, 1.0};
    const MinkowskiResult res = solve_minkowski(prob, opt);
    double mean = 0.0;
    for (int i = 0; i < res.grid.size(); ++i)
      mean += res.grid.weight[i] * res.u[i];
    mean /= res.grid.area;
    d = "residual " + num(res.residual) + ", osc " + num(res.osc_ratio) +
        ", mean " + num(mean) + ", regime: " + res.regime;
    return std::max({res.residual, res.osc_ratio, std::abs(mean - 1.0)});
  });

  s.run("solve.scale-invariant-rejected", 0.5, [](std::string& d) {
    // alpha + delta + beta = 1 admits no stationary scale: must refuse
    MinkowskiProblem prob;
    prob.equation = EquationKind::lp_cm;
    prob.n = 2;
    prob.k = 1;
    prob.p = 2.0;  // maps to sigma = 1 exactly
    SolveOptions opt;
    opt.n_theta = 16;
    opt.n_phi = 16;
    try {
      solve_minkowski(prob, opt);
    } catch (const RegimeError& e) {
      d = std::string("rejected: ") + e.what();
      return 0.0;
    }
    d = "no rejection";
    return 1.0;
  });
}

void check_error_paths(Suite& s) {
  s.run("flow.config-validation-rejects", 0.5, [](std::string& d) {
    int missed = 0;
    // negative radius
    try {
      ShapeSpec sp;
      sp.radius = -1.0;
      sp.validate(2);
      ++missed;
    } catch (const ConfigError&) {
    }
    // quotient upper index beyond the dimension
    try {
      CurvatureSpec cs;
      cs.kind = CurvatureKind::quotient;
      cs.k = 0;
      cs.l = 2;
      cs.validate(1);
      ++missed;
    } catch (const ConfigError&) {
    }
    // anisotropy on a radial variant
    try {
      FlowParams P = circle_flow(FlowVariant::radial_normalized);
      P.psi.kind = PsiSpec::Kind::linear;
      P.psi.c = 0.3;
      P.validate();
      ++missed;
    } catch (const ConfigError&) {
    }
    // out-of-range safety factor
    try {
      FlowParams P = circle_flow(FlowVariant::radial_normalized);
      P.time.dt_safety = 1.5;
      P.validate();
      ++missed;
    } catch (const ConfigError&) {
    }
    d = missed == 0 ? "all four bad configs rejected"
                    : num(missed) + " bad configs accepted";
    return double(missed);
  });

  s.run("flow.step-underflow-rejected", 0.5, [](std::string& d) {
    FlowParams P = circle_flow(FlowVariant::radial_original);
    P.time.dt_fixed = 1e-13;
    P.time.t_end = 1.0;
    try {
      run_flow(P);
    } catch (const NumericalError& e) {
      d = std::string("rejected: ") + e.what();
      return 0.0;
    }
    d = "no rejection";
    return 1.0;
  });

  s.run("flow.cone-exit-rejected", 0.5, [](std::string& d) {
    // strongly wiggly curve leaves the sigma_1 > 0 cone immediately
    FlowParams P = circle_flow(FlowVariant::radial_original);
    P.initial.kind = ShapeSpec::Kind::zonal_mode;
    P.initial.radius = 1.0;
    P.initial.c = 0.45;
    P.initial.mode = 3;
    P.time.max_steps = 5;
    try {
      run_flow(P);
    } catch (const NumericalError& e) {
      d = std::string("rejected: ") + e.what();
      return 0.0;
    }
    d = "no rejection";
    return 1.0;
  });
}

// ---------------------------------------------------------------------------
// full: sphere grid (n = 2)
// ---------------------------------------------------------------------------

void check_sphere_grid(Suite& s) {
  const double pi = std::acos(-1.0);

  // quadrature of x3^2 at two sizes
  const auto quad_error = [&](int nt) {
    const Grid g = Grid::make(2, nt, 2 * nt);
    std::vector<double> f(g.size());
    for (int j = 0; j < g.n_theta; ++j)
      for (int k = 0; k < g.n_phi; ++k)
        f[g.index(j, k)] = g.cos_theta[j] * g.cos_theta[j];
    return std::abs(integrate(g, f) - 4.0 * pi / 3.0) / (4.0 * pi / 3.0);
  };
  const double q_c = quad_error(32), q_f = quad_error(64);
  s.run("grid.sphere-quadrature-error", 5e-3, [&](std::string& d) {
    const Grid g = Grid::make(2, 64, 128);
    std::vector<double> one(g.size(), 1.0);
    const double e0 = std::abs(integrate(g, one) - 4.0 * pi);
    d = "area dev " + num(e0) + ", second moment rel " + num(q_f);
    return std::max(e0, q_f);
  });
  s.run("grid.sphere-quadrature-order", 0.0, [&](std::string& d) {
    const double ratio = q_c / q_f;
    d = "halving ratio " + num(ratio) + " (need >= 3.0)";
    return 3.0 - ratio;
  });

  // restriction of a linear function: Hess w = -w I exactly
  const auto linear_error = [&](int nt) {
    const Grid g = Grid::make(2, nt, 2 * nt);
    const double a[3] = {0.3, -0.4, 0.866};
    const double a2 = a[0] * a[0] + a[1] * a[1] + a[2] * a[2];
    std::vector<double> w(g.size());
    for (int i = 0; i < g.size(); ++i)
      w[i] = a[0] * g.x1[i] + a[1] * g.x2[i] + a[2] * g.x3[i];
    Deriv dv;
    dv.resize(g.size());
    DerivWorkspace ws;
    differentiate(g, w, dv, ws);
    double worst = 0.0;
    for (int i = 0; i < g.size(); ++i) {
      worst = std::max(worst, std::abs(dv.h11[i] + w[i]));
      worst = std::max(worst, std::abs(dv.h22[i] + w[i]));
      worst = std::max(worst, std::abs(dv.h12[i]));
      const double grad2 = dv.g1[i] * dv.g1[i] + dv.g2[i] * dv.g2[i];
      worst = std::max(worst, std::abs(grad2 - (a2 - w[i] * w[i])));
    }
    return worst;
  };
  const double l_c = linear_error(32), l_f = linear_error(64);
  s.run("grid.sphere-linear-hessian", 1e-2, [&](std::string& d) {
    d = "sup dev " + num(l_f) + " at 64x128 (pole rows included)";
    return l_f;
  });
  s.run("grid.sphere-linear-hessian-order", 0.0, [&](std::string& d) {
    const double ratio = l_c / l_f;
    d = "halving ratio " + num(ratio) + " (need >= 3.0)";
    return 3.0 - ratio;
  });

  // degree-2 harmonics: trace of the Hessian is -6 w
  const auto laplace_error = [&](int nt) {
    const Grid g = Grid::make(2, nt, 2 * nt);
    std::vector<double> w1(g.size()), w2(g.size());
    for (int i = 0; i < g.size(); ++i) {
      w1[i] = g.x1[i] * g.x3[i];
      w2[i] = g.x1[i] * g.x1[i] - g.x2[i] * g.x2[i];
    }
    Deriv dv;
    dv.resize(g.size());
    DerivWorkspace ws;
    double worst = 0.0;
    for (const auto* w : {&w1, &w2}) {
      differentiate(g, *w, dv, ws);
      for (int i = 0; i < g.size(); ++i)
        worst = std::max(worst,
                         std::abs(dv.h11[i] + dv.h22[i] + 6.0 * (*w)[i]));
    }
    return worst;
  };
  const double p_c = laplace_error(32), p_f = laplace_error(64);
  s.run("grid.sphere-harmonic-laplacian", 2e-2, [&](std::string& d) {
    d = "sup dev " + num(p_f) + " for two degree-2 harmonics";
    return p_f;
  });
  s.run("grid.sphere-harmonic-laplacian-order", 0.0, [&](std::string& d) {
    const double ratio = p_c / p_f;
    d = "halving ratio " + num(ratio) + " (need >= 3.0)";
    return 3.0 - ratio;
  });

  s.run("grid.antipode-involution", 1e-12, [](std::string& d) {
    double worst = 0.0;
    for (int n : {1, 2}) {
      const Grid g = n == 1 ? Grid::make(1, 256) : Grid::make(2, 32, 64);
      for (int i = 0; i < g.size(); ++i) {
        const int a = g.antipode[i];
        if (g.antipode[a] != i) worst = std::max(worst, 1.0);
        worst = std::max(worst, std::abs(g.x1[a] + g.x1[i]));
        worst = std::max(worst, std::abs(g.x2[a] + g.x2[i]));
        worst = std::max(worst, std::abs(g.x3[a] + g.x3[i]));
      }
    }
    d = "exact index involution, coordinates negate";
    return worst;
  });
}

// ---------------------------------------------------------------------------
// full: sphere shapes and functionals
// ---------------------------------------------------------------------------

void check_sphere_shapes(Suite& s) {
  // bound leaves room for a few hundred ulps of trig accumulation in the
  // Hessian chain -- the radius itself is not representable
  s.run("shape.sphere-geometry-exact", 1e-11, [](std::string& d) {
    const Grid g = Grid::make(2, 64, 128);
    const double r = 1.3;
    std::vector<double> c(g.size(), r);
    SupportGeometry sg;
    sg.build(g, c);
    RadialGeometry rg;
    rg.build(g, c);
    double worst = 0.0;
    for (int i = 0; i < g.size(); ++i) {
      worst = std::max({worst, std::abs(sg.a11[i] - r), std::abs(sg.a22[i] - r),
                        std::abs(sg.a12[i]), std::abs(sg.det_a[i] - r * r),
                        std::abs(sg.rho[i] - r), std::abs(sg.lam1[i] - r)});
      worst = std::max({worst, std::abs(rg.kappa1[i] - 1.0 / r),
                        std::abs(rg.kappa2[i] - 1.0 / r),
                        std::abs(rg.omega[i] - 1.0), std::abs(rg.u[i] - r)});
    }
    d = "round sphere: both representations exact";
    return worst;
  });

  // det A = (abc)^2 / u^4 and |contact point| on ellipsoids
  const auto ellipsoid_error = [](int nt, const std::array<double, 3>& ax) {
    const Grid g = Grid::make(2, nt, 2 * nt);
    ShapeSpec sp;
    sp.kind = ShapeSpec::Kind::ellipsoid;
    sp.semi_axes = ax;
    std::vector<double> u;
    sp.support(g, u);
    SupportGeometry sg;
    sg.build(g, u);
    const double abc2 = ax[0] * ax[0] * ax[1] * ax[1] * ax[2] * ax[2];
    double worst = 0.0;
    for (int i = 0; i < g.size(); ++i) {
      const double uu = u[i] * u[i];
      const double det_want = abc2 / (uu * uu);
      const double rho_want =
          std::sqrt(pow_fast(ax[0], 4.0) * g.x1[i] * g.x1[i] +
                    pow_fast(ax[1], 4.0) * g.x2[i] * g.x2[i] +
                    pow_fast(ax[2], 4.0) * g.x3[i] * g.x3[i]) /
          u[i];
      worst = std::max(worst, std::abs(sg.det_a[i] - det_want) / det_want);
      worst = std::max(worst, std::abs(sg.rho[i] - rho_want) / rho_want);
    }
    return worst;
  };
  const std::array<double, 3> zon{1.0, 1.0, 1.4}, tri{1.0, 1.15, 1.35};
  const double e_c = std::max(ellipsoid_error(32, zon), ellipsoid_error(32, tri));
  const double e_f = std::max(ellipsoid_error(64, zon), ellipsoid_error(64, tri));

  s.run("shape.ellipsoid-support-closed-form", 1e-13, [&](std::string& d) {
    const Grid g = Grid::make(2, 64, 128);
    ShapeSpec sp;
    sp.kind = ShapeSpec::Kind::ellipsoid;
    sp.semi_axes = tri;
    std::vector<double> u;
    sp.support(g, u);
    double worst = 0.0;
    for (int i = 0; i < g.size(); ++i) {
      const double want = std::sqrt(tri[0] * tri[0] * g.x1[i] * g.x1[i] +
                                    tri[1] * tri[1] * g.x2[i] * g.x2[i] +
                                    tri[2] * tri[2] * g.x3[i] * g.x3[i]);
      worst = std::max(worst, std::abs(u[i] - want));
    }
    d = "u = sqrt(sum a_i^2 x_i^2)";
    return worst;
  });

  s.run("shape.ellipsoid-curvature-oracle", 1e-2, [&](std::string& d) {
    d = "det A and contact distance vs closed forms, sup rel " + num(e_f);
    return e_f;
  });
  s.run("shape.ellipsoid-curvature-order", 0.0, [&](std::string& d) {
    const double ratio = e_c / e_f;
    d = "halving ratio " + num(ratio) + " (need >= 2.8)";
    return 2.8 - ratio;
  });

  // total curvature of any closed star-shaped surface is 4 pi
  const auto gauss_bonnet = [](int nt, const ShapeSpec& sp) {
    const Grid g = Grid::make(2, nt, 2 * nt);
    std::vector<double> rho;
    sp.radial(g, rho);
    RadialGeometry rg;
    rg.build(g, rho);
    double total = 0.0;
    for (int i = 0; i < g.size(); ++i)
      total += rg.kappa1[i] * rg.kappa2[i] * rho[i] * rho[i] * rg.omega[i] *
               g.weight[i];
    const double pi = std::acos(-1.0);
    return std::abs(total - 4.0 * pi) / (4.0 * pi);
  };
  ShapeSpec ell;
  ell.kind = ShapeSpec::Kind::ellipsoid;
  ell.semi_axes = {1.0, 1.0, 1.4};
  ShapeSpec star;
  star.kind = ShapeSpec::Kind::zonal_mode;
  star.radius = 1.0;
  star.c = 0.15;
  star.mode = 3;
  const double gb_c = gauss_bonnet(32, ell);
  const double gb_f = std::max(gauss_bonnet(64, ell), gauss_bonnet(64, star));

  s.run("shape.star-gauss-bonnet", 5e-3, [&](std::string& d) {
    d = "total curvature / 4pi - 1, ellipsoid and wavy star: " + num(gb_f);
    return gb_f;
  });
  s.run("shape.star-gauss-bonnet-order", 0.0, [&](std::string& d) {
    const double ratio = gb_c / gauss_bonnet(64, ell);
    d = "halving ratio " + num(ratio) + " (need >= 2.8)";
    return 2.8 - ratio;
  });

  s.run("shape.sphere-support-envelope", 1e-2, [](std::string& d) {
    // numeric envelope vs the ellipsoid closed form
    const Grid g = Grid::make(2, 32, 64);
    ShapeSpec sp;
    sp.kind = ShapeSpec::Kind::ellipsoid;
    sp.semi_axes = {1.0, 1.0, 1.3};
    std::vector<double> rho;
    sp.radial(g, rho);
    const std::vector<double> u = support_from_radial(g, rho);
    double worst = 0.0;
    for (int i = 0; i < g.size(); ++i) {
      const double want = std::sqrt(g.x1[i] * g.x1[i] + g.x2[i] * g.x2[i] +
                                    1.69 * g.x3[i] * g.x3[i]);
      worst = std::max(worst, std::abs(u[i] - want) / want);
    }
    d = "scan + quadratic refinement, sup rel " + num(worst);
    return worst;
  });

  s.run("shape.ellipsoid-mixed-representation-volume", 5e-3,
        [](std::string& d) {
          // (1/3) avg rho^3 equals vol/|S^2| in both parametrizations
          const Grid g = Grid::make(2, 64, 128);
          const std::array<double, 3> ax{1.0, 1.1, 1.3};
          ShapeSpec sp;
          sp.kind = ShapeSpec::Kind::ellipsoid;
          sp.semi_axes = ax;
          std::vector<double> u, rho;
          sp.support(g, u);
          sp.radial(g, rho);
          SupportGeometry sg;
          sg.build(g, u);
          FunctionalContext fc;
          PsiSpec one;
          fc.init(g, one, 2.0);
          const double want = ax[0] * ax[1] * ax[2] / 3.0;
          const double via_support = v_q_value(fc, sg, 3.0);
          const double via_radial = v_q_value_radial(g, rho, 3.0);
          d = "support " + num(via_support) + ", radial " + num(via_radial) +
              ", exact " + num(want);
          return std::max({std::abs(via_support - want) / want,
                           std::abs(via_radial - want) / want,
                           std::abs(via_support - via_radial) / want});
        });
}

void check_sphere_functionals(Suite& s) {
  s.run("functionals.ball-closed-forms", 1e-13, [](std::string& d) {
    const Grid g = Grid::make(2, 64, 128);
    FunctionalContext fc;
    PsiSpec one;
    fc.init(g, one, 2.0);
    const double r = 1.3;
    std::vector<double> u(g.size(), r);
    SupportGeometry sg;
    sg.build(g, u);
    double worst = 0.0;
    worst = std::max(worst, std::abs(u_p_value(fc, u, 2.0) - r * r / 2.0));
    worst = std::max(worst, std::abs(u_p_value(fc, u, 0.0) - std::log(r)));
    worst = std::max(worst, std::abs(v_q_value(fc, sg, 3.0) - r * r * r / 3.0));
    worst = std::max(worst, std::abs(v_q_value(fc, sg, 0.0) - std::log(r)));
    // unit ball: the normalization factor and the gap are exact
    std::vector<double> u1(g.size(), 1.0);
    SupportGeometry sg1;
    sg1.build(g, u1);
    worst = std::max(worst,
                     std::abs(phi_integral(fc, sg1, 0.0, 0.0, 2.0) - 1.0));
    worst = std::max(worst, stationarity_gap(fc, sg1, 0.0, 0.0, 2.0, 1.0));
    d = "powers and log branches on balls";
    return worst;
  });

  s.run("functionals.ellipsoid-stationarity-gap", 0.0, [](std::string& d) {
    // a genuinely non-round body must show a visible gap
    const Grid g = Grid::make(2, 64, 128);
    ShapeSpec sp;
    sp.kind = ShapeSpec::Kind::ellipsoid;
    sp.semi_axes = {1.0, 1.0, 1.25};
    std::vector<double> u;
    sp.support(g, u);
    SupportGeometry sg;
    sg.build(g, u);
    FunctionalContext fc;
    PsiSpec one;
    fc.init(g, one, 2.0);
    const double phi = phi_integral(fc, sg, 0.0, 0.0, 2.0);
    const double gap = stationarity_gap(fc, sg, 0.0, 0.0, 2.0, phi);
    d = "gap " + num(gap) + " (need >= 0.01)";
    return 0.01 - gap;
  });
}

// ---------------------------------------------------------------------------
// full: sphere flows
// ---------------------------------------------------------------------------

FlowParams sphere_flow(FlowVariant v, int k, double beta) {
  FlowParams P;
  P.variant = v;
  P.n = 2;
  P.n_theta = 32;
  P.n_phi = 64;
  P.beta = beta;
  if (is_radial(v)) {
    P.curvature = spec_sigma_root(k, CurvatureArgument::principal_curvatures);
  } else {
    P.curvature = spec_sigma_root(k, CurvatureArgument::principal_radii);
  }
  P.initial.kind = ShapeSpec::Kind::ball;
  P.initial.radius = 1.0;
  return P;
}

void check_sphere_flows(Suite& s) {
  const struct {
    FlowVariant v;
    int k;
    double beta;
    const char* name;
  } variants[] = {
      {FlowVariant::radial_normalized, 2, 1.0,
       "flow.sphere-stationary-radial"},
      {FlowVariant::support_normalized_sigma_k, 1, 1.0,
       "flow.sphere-stationary-sigma-k"},
      {FlowVariant::support_normalized_gauss, 2, 2.0,
       "flow.sphere-stationary-gauss"},
  };
  for (const auto& c : variants) {
    s.run(c.name, 1e-6, [&](std::string& d) {
      FlowParams P = sphere_flow(c.v, c.k, c.beta);
      P.time.max_steps = 1000;
      P.time.record_every = 50;
      const FlowResult R = run_flow(P);
      d = "unit sphere, 1000 steps, drift " + num(history_unit_drift(R));
      return history_unit_drift(R);
    });
  }

  s.run("flow.sphere-exponential-exact", 1e-6, [](std::string& d) {
    // scale-invariant speed: the sphere radius is exactly e^t
    FlowParams P = sphere_flow(FlowVariant::radial_original, 2, 1.0);
    P.time.t_end = 0.5;
    P.time.dt_fixed = 2e-4;
    P.time.record_every = 250;
    const FlowResult R = run_flow(P);
    const double want = std::exp(0.5);
    double worst = 0.0;
    for (double v : R.field) worst = std::max(worst, std::abs(v - want) / want);
    d = "radius vs e^{1/2}, rel " + num(worst);
    return worst;
  });

  s.run("flow.sphere-zonal-ring-exact", 0.0, [](std::string& d) {
    // rotational symmetry is preserved bitwise by the kernel and the stepper
    FlowParams P = sphere_flow(FlowVariant::radial_normalized, 2, 1.0);
    P.initial.kind = ShapeSpec::Kind::zonal_mode;
    P.initial.radius = 1.0;
    P.initial.c = 0.2;
    P.initial.mode = 2;
    P.time.max_steps = 300;
    P.time.record_every = 100;
    const FlowResult R = run_flow(P);
    double worst = 0.0;
    for (int j = 0; j < R.grid.n_theta; ++j) {
      double lo = R.field[R.grid.index(j, 0)], hi = lo;
      for (int k = 1; k < R.grid.n_phi; ++k) {
        const double v = R.field[R.grid.index(j, k)];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      worst = std::max(worst, hi - lo);
    }
    d = "max in-ring spread after 300 steps: " + num(worst);
    return worst;
  });

  // one anisotropic volume-normalized run feeds two checks
  {
    FlowParams P = sphere_flow(FlowVariant::support_normalized_gauss, 2, 2.0);
    P.psi.kind = PsiSpec::Kind::quadratic;
    P.psi.terms = {PsiSpec::QuadTerm{{0.0, 0.0, 1.0}, 0.1}};
    P.initial.kind = ShapeSpec::Kind::ellipsoid;
    P.initial.semi_axes = {1.0, 1.0, 1.25};
    P.time.max_steps = 600;
    P.time.record_every = 1;
    FlowResult R;
    bool ran = false;
    std::string err;
    try {
      R = run_flow(P);
      ran = true;
    } catch (const std::exception& e) {
      err = e.what();
    }

    s.run("flow.sphere-volume-conservation", 1e-3, [&](std::string& d) {
      if (!ran) {
        d = "run failed: " + err;
        return 1.0;
      }
      const double v0 = R.history.front().v_q;
      double worst = 0.0;
      for (const FlowRecord& r : R.history)
        worst = std::max(worst, std::abs(r.v_q - v0) / std::abs(v0));
      d = "conserved integral rel drift " + num(worst) + " over 600 steps";
      return worst;
    });

    s.run("flow.sphere-energy-monotone", 1e-8, [&](std::string& d) {
      if (!ran) {
        d = "run failed: " + err;
        return 1.0;
      }
      double worst = 0.0;
      for (std::size_t i = 1; i < R.history.size(); ++i) {
        const double prev = R.history[i - 1].j_pq;
        const double rise = R.history[i].j_pq - prev;
        worst = std::max(worst, rise / (1.0 + std::abs(prev)));
      }
      d = "max per-step energy rise (relative) " + num(worst);
      return worst;
    });
  }

  s.run("flow.sphere-thread-count-invariance", 0.0, [](std::string& d) {
    ThreadGuard guard;
    FlowParams P = sphere_flow(FlowVariant::radial_normalized, 2, 1.0);
    P.initial.kind = ShapeSpec::Kind::radial_graph;
    P.initial.radius = 1.0;
    P.initial.c = 0.2;
    P.initial.axis = {0.6, 0.0, 0.8};
    P.time.max_steps = 120;
    P.time.record_every = 1;
    par::set_thread_override(1);
    const FlowResult A = run_flow(P);
    par::set_thread_override(0);  // library default (all cores when parallel)
    const FlowResult B = run_flow(P);
    double worst = 0.0;
    for (int i = 0; i < int(A.field.size()); ++i)
      worst = std::max(worst, std::abs(A.field[i] - B.field[i]));
    if (A.history.size() != B.history.size()) worst = std::max(worst, 1.0);
    for (std::size_t i = 0; i < A.history.size() && i < B.history.size(); ++i) {
      const FlowRecord &a = A.history[i], &b = B.history[i];
      worst = std::max({worst, std::abs(a.t - b.t), std::abs(a.dt - b.dt),
                        std::abs(a.min_rho - b.min_rho),
                        std::abs(a.max_rho - b.max_rho),
                        std::abs(a.residual - b.residual)});
    }
    d = "single-thread vs default run, max |diff| " + num(worst);
    return worst;
  });

  s.run("flow.sphere-speed-ratio-barrier", 1e-6, [](std::string& d) {
    // the speed ratio extremes are trapped one-sidedly by eta
    FlowParams P =
        sphere_flow(FlowVariant::support_normalized_sigma_k, 1, 1.0);
    P.alpha = -1.0;
    P.delta = -0.5;
    P.psi.kind = PsiSpec::Kind::quadratic;
    P.psi.terms = {PsiSpec::QuadTerm{{0.0, 0.0, 1.0}, 0.05}};
    P.initial.kind = ShapeSpec::Kind::ellipsoid;
    P.initial.semi_axes = {1.0, 1.0, 1.2};
    P.time.max_steps = 800;
    P.time.record_every = 1;
    const FlowResult R = run_flow(P);
    const double eta = R.eta;
    double worst = 0.0;
    if (!(R.history.front().q_min >= 1.049 * eta)) worst = 1.0;  // prescale
    for (std::size_t i = 1; i < R.history.size(); ++i) {
      const double hi_prev = std::max(R.history[i - 1].q_max, eta);
      const double hi = std::max(R.history[i].q_max, eta);
      const double lo_prev = std::min(R.history[i - 1].q_min, eta);
      const double lo = std::min(R.history[i].q_min, eta);
      worst = std::max(worst, (hi - hi_prev) / eta);
      worst = std::max(worst, (lo_prev - lo) / eta);
    }
    d = "start ratio " + num(R.history.front().q_min / eta) +
        " x eta; max one-sided violation " + num(worst);
    return worst;
  });

  s.run("flow.sphere-blow-up-estimate", 0.02, [](std::string& d) {
    FlowParams P = sphere_flow(FlowVariant::support_original, 2, 2.0);
    P.stop.blow_up_factor = 80.0;
    const FlowResult R = run_flow(P);
    if (R.verdict != FlowVerdict::blown_up) {
      d = std::string("verdict ") + to_string(R.verdict);
      return 1.0;
    }
    const double t_hat = estimate_blow_up_time(R, 5.0, 60.0);
    d = "estimated " + num(t_hat) + " vs 1 (window [5,60] x r0)";
    return std::abs(t_hat - 1.0);
  });

  s.run("flow.sphere-perturbation-decay", 5e-3, [](std::string& d) {
    // zonal bump flattens out; the gradient decays exponentially
    FlowParams P = sphere_flow(FlowVariant::radial_normalized, 1, 1.0);
    P.alpha = -1.0;
    P.initial.kind = ShapeSpec::Kind::radial_graph;
    P.initial.radius = 1.0;
    P.initial.c = 0.3;
    P.initial.axis = {0.0, 0.0, 1.0};
    P.time.max_steps = 60000;
    P.time.record_every = 4;
    P.stop.osc_tol = 5e-3;
    const FlowResult R = run_flow(P);
    if (R.verdict != FlowVerdict::converged) {
      d = std::string("verdict ") + to_string(R.verdict);
      return 1.0;
    }
    // least-squares rate over the trailing half of the history
    std::vector<double> ts, ys;
    for (std::size_t i = R.history.size() / 2; i < R.history.size(); ++i) {
      if (R.history[i].max_grad_gamma <= 0.0) continue;
      ts.push_back(R.history[i].t);
      ys.push_back(2.0 * std::log(R.history[i].max_grad_gamma));
    }
    const LinearFit fit = linear_fit(ts, ys);
    const FlowRecord& last = R.history.back();
    d = "osc " + num(last.max_rho - last.min_rho) + ", decay rate " +
        num(-fit.slope) + ", r2 " + num(fit.r2);
    if (!(fit.slope < 0.0) || fit.r2 < 0.9) return 1.0;
    return last.max_rho - last.min_rho;
  });
}

// ---------------------------------------------------------------------------
// full: sphere solver
// ---------------------------------------------------------------------------

void check_sphere_solver(Suite& s) {
  MinkowskiResult res;
  MinkowskiProblem prob;
  bool solved = false;
  std::string err;
  prob.equation = EquationKind::lp_dual_minkowski;
  prob.n = 2;
  prob.k = 2;
  prob.p = 3.0;
  prob.q = 2.0;
  SolveOptions opt;
  opt.n_theta = 32;
  opt.n_phi = 64;
  opt.initial.kind = ShapeSpec::Kind::ellipsoid;
  opt.initial.semi_axes = {1.0, 1.0, 1.3};
  const auto t0 = Clock::now();
  try {
    res = solve_minkowski(prob, opt);
    solved = true;
  } catch (const std::exception& e) {
    err = e.what();
  }
  const double solve_secs = seconds_since(t0);

  s.run("solve.sphere-isotropic-dual", 1e-3, [&](std::string& d) {
    if (!solved) {
      d = "solve failed: " + err;
      return 1.0;
    }
    double mean = 0.0;
    for (int i = 0; i < res.grid.size(); ++i)
      mean += res.grid.weight[i] * res.u[i];
    mean /= res.grid.area;
    d = "residual " + num(res.residual) + ", osc " + num(res.osc_ratio) +
        ", mean " + num(mean) + ", " + num(solve_secs) + " s, regime: " +
        res.regime;
    return std::max({res.residual, res.osc_ratio, std::abs(mean - 1.0)});
  });

  s.run("solve.residual-recheck", 1e-3, [&](std::string& d) {
    // the reported shape must satisfy the equation re-evaluated from scratch
    if (!solved) {
      d = "solve failed: " + err;
      return 1.0;
    }
    SupportGeometry sg;
    sg.build(res.grid, res.u);
    const ResidualField rf = residual(res.grid, sg, prob);
    d = "sup rel residual from scratch " + num(rf.sup_rel);
    return rf.sup_rel;
  });

  s.run("solve.anisotropy-condition-sphere", 0.5, [](std::string& d) {
    const Grid g = Grid::make(2, 64, 128);
    int bad = 0;
    PsiSpec bump;
    bump.kind = PsiSpec::Kind::quadratic;
    bump.terms = {PsiSpec::QuadTerm{{0.0, 0.0, 1.0}, 0.05}};
    const PsiConditionReport ok = check_psi_condition(g, bump, -1.0, 1.0);
    if (!ok.positive_definite) ++bad;
    // a strong lopsided weight with a negative transform power is indefinite
    PsiSpec steep;
    steep.kind = PsiSpec::Kind::linear;
    steep.c = 0.9;
    const PsiConditionReport mix = check_psi_condition(g, steep, 3.0, 1.0);
    if (mix.positive_definite || mix.negative_definite) ++bad;
    bool threw = false;
    try {
      check_psi_condition(g, bump, 2.0, 1.0);
    } catch (const ConfigError&) {
      threw = true;
    }
    if (!threw) ++bad;
    d = "small bump definite (min eig " + num(ok.min_eig) +
        "), steep weight indefinite, singular exponent rejected";
    return double(bad);
  });
}

}  // namespace

// ---------------------------------------------------------------------------
// suite assembly
// ---------------------------------------------------------------------------

std::vector<CheckResult> run_validation(ValidateLevel level) {
  Suite s;
  check_exact(s);
  check_exponents(s);
  check_curvature(s);
  check_circle_grid(s);
  check_circle_shapes(s);
  check_weights(s);
  check_circle_flows(s);
  check_circle_solver(s);
  check_error_paths(s);
  if (level == ValidateLevel::full) {
    check_sphere_grid(s);
    check_sphere_shapes(s);
    check_sphere_functionals(s);
    check_sphere_flows(s);
    check_sphere_solver(s);
  }
  return s.rows;
}

bool all_passed(const std::vector<CheckResult>& results) {
  for (const CheckResult& r : results)
    if (!r.pass) return false;
  return true;
}

std::string format_check_table(const std::vector<CheckResult>& results) {
  std::size_t width = 4;
  for (const CheckResult& r : results) width = std::max(width, r.name.size());
  std::string out;
  int passed = 0;
  double total = 0.0;
  for (const CheckResult& r : results) {
    char line[256];
    std::snprintf(line, sizeof line, "[%s] %-*s  measured %10.3e  bound %9.3e  (%6.2f s)",
                  r.pass ? "PASS" : "FAIL", int(width), r.name.c_str(),
                  r.measured, r.bound, r.seconds);
    out += line;
    if (!r.detail.empty()) {
      out += "  -- ";
      out += r.detail;
    }
    out += '\n';
    passed += r.pass ? 1 : 0;
    total += r.seconds;
  }
  char tail[128];
  std::snprintf(tail, sizeof tail, "%d/%zu checks passed in %.2f s\n", passed,
                results.size(), total);
  out += tail;
  return out;
}

}  // namespace curvflow
