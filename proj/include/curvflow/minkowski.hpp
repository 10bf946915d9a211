#pragma once

// Stationary Minkowski-type problems on S^n, solved by running the matching
// normalized expanding flow until the shape is a fixed point.
//
// Equation catalogue (A = Hess u + u I, rho = sqrt(u^2 + |Du|^2)):
//   lp_minkowski        det A      = u^{p-1} psi                    (k = n)
//   lp_cm               sigma_k(A) = u^{p-1} psi                    (k < n)
//   lp_dual_minkowski   det A      = rho^{n+1-q} u^{p-1} psi        (k = n)
//   lp_dual_cm          sigma_k(A) = rho^{k+1-q} u^{p-1} psi        (k < n)
//   soliton             psi u^{alpha-1} rho^delta sigma_k^{beta/k} = eta
//
// Reduction to a flow: with beta_flow = beta * k / n (beta is the n-based
// steepness label the caller picks; the equations themselves have none),
//     alpha = 1 - beta_flow (p-1)/k,   delta = beta_flow (q_eff - k - 1)/k,
// where q_eff is the rho-exponent parameter of the equation (the given q for
// the dual kinds, k+1 otherwise), and the flow weight is psi^{-beta_flow/k}.
// The normalized sigma_k flow (k < n) or the V_q-conserving Gauss-type flow
// (k = n) then has the rescaled solutions of the equation as fixed points:
// its limit solves sigma_k = c0 * RHS with a constant
//     c0 = eta^{k/beta_flow}   (k < n)      c0 = phi_final^{-n/beta}  (k = n)
// which a dilation u <- c0^{1/(p - q_eff)} u absorbs whenever p != q_eff.
// For p = q the equation is scale-invariant (solutions form a dilation
// family); the limit is reported together with c0 un-absorbed.
//
// Admissible regimes (anything else throws RegimeError):
//   k < n: needs alpha + delta + beta_flow < 1 (equivalently p > q_eff) and
//          either  alpha <= 0        with the anisotropy condition
//                                    (Hess g + g I) > 0, g = psi_flow^{1/(1+beta-alpha)}
//          or      alpha > 1 + beta  with (Hess g + g I) < 0.
//   k = n: p > q, or p = q != 0, for any smooth positive psi;
//          p < q needs even psi and (p >= 0 or q <= 0 or -q* < p < 0); the
//          run is then restricted to origin-symmetric bodies and convergence
//          is subsequential.

#include <string>
#include <vector>

#include "curvflow/flow.hpp"
#include "curvflow/grid.hpp"
#include "curvflow/shape.hpp"

namespace curvflow {

enum class EquationKind {
  lp_minkowski,
  lp_cm,
  lp_dual_minkowski,
  lp_dual_cm,
  soliton,
};
const char* to_string(EquationKind e);

struct MinkowskiProblem {
  EquationKind equation = EquationKind::lp_minkowski;
  int n = 2;
  int k = 2;           // sigma_k order; must equal n for the det kinds
  double p = 2.0;      // u-exponent is p-1 (ignored by the soliton kind)
  double q = 0.0;      // dual kinds: rho-exponent is k+1-q
  // soliton kind: the flow exponents are the equation data themselves.
  // Other kinds: beta is the steepness label fed to the exponent dictionary
  // (beta_flow = beta k/n); 0 picks the default beta = n.
  double alpha = 0.0;
  double delta = 0.0;
  double beta = 0.0;
  PsiSpec psi;

  void validate() const;        // throws ConfigError
  bool is_dual() const;
  double q_effective() const;   // rho-exponent parameter of the equation
};

// Pointwise defect of the stationary equation: lhs - rhs per node and
// sup |lhs - rhs| / rhs, with the right-hand side scaled by c0.
struct ResidualField {
  std::vector<double> pointwise;
  double sup_rel = 0;
};
ResidualField residual(const Grid& g, const SupportGeometry& sg,
                       const MinkowskiProblem& prob, double c0 = 1.0);

// sup |Q - eta| / eta for Q = psi u^{alpha-1} rho^delta sigma_k(A)^{beta/k}.
double soliton_residual(const Grid& g, const SupportGeometry& sg,
                        const PsiSpec& psi, double alpha, double delta,
                        double beta, int k, double eta);

struct SolveOptions {
  int n_theta = 48;
  int n_phi = 96;               // ignored for n = 1
  double residual_tol = 1e-3;   // stationary-equation residual target
  long max_steps = 400000;      // flow budget per refinement round
  int max_rounds = 12;
  double dt_safety = 0.4;
  ShapeSpec initial;            // default: unit ball
};

struct MinkowskiResult {
  std::vector<double> u;   // solution support function (dilation-absorbed
                           // whenever p != q_eff)
  Grid grid;
  std::string regime;      // hypothesis branch that admitted the run
  bool subsequential = false;
  double p = 0, q = 0;     // equation exponents (soliton: dictionary labels)
  double alpha = 0, delta = 0, beta_flow = 0;
  double eta = 0;          // unit-sphere constant of the flow
  double c0 = 0;           // constant solved by the raw flow limit (absorbed
                           // into u whenever the equation is not p = q)
  double residual = 0;     // equation residual of the returned shape
  double osc_ratio = 0;    // (max u - min u) / mean u
  long steps = 0;          // accepted flow steps, all rounds
  int rounds = 0;
  double tau_final = 0;
  double wall_seconds = 0;
  FlowVerdict verdict = FlowVerdict::converged;
};

// Run the matching normalized flow in rounds, tightening the flow's own
// stopping tolerance until the from-scratch equation residual of the current
// shape meets residual_tol. Throws RegimeError outside the admissible
// regimes and NumericalError when a round exhausts max_steps or the rounds
// stall.
MinkowskiResult solve_minkowski(const MinkowskiProblem& prob,
                                const SolveOptions& opt);

// Solve twice from two starts and return sup |u_a - u_b| of the limits; for
// p = q each limit is first normalized to unit q-mean radius (the equation
// only determines the shape up to dilation there).
double uniqueness_probe(const MinkowskiProblem& prob, const SolveOptions& opt,
                        const ShapeSpec& start_a, const ShapeSpec& start_b);

}  // namespace curvflow
