#pragma once

// Exponent dictionary and integral functionals.
//
// A flow with speed psi u^alpha rho^delta K^{-beta/n} (Gauss-type, principal
// radii) is classified by the pair
//     p = 1 + n(1-alpha)/beta,     q = n + 1 + n delta/beta.
// Its normalized version conserves V_q and decreases J = U_p - V_q, where
//
//     U_p = (1/p) avg_{S^n} u^p dmu_psi     (log branch at p = 0)
//     V_q = (1/q) avg_{S^n} rho^q dxi       (log branch at q = 0)
//     dmu_psi = psi^{-n/beta} dx,  averages normalized by total mass.
//
// V_q is an integral over the radial parametrization; on the normal grid it
// is computed with the change-of-variables Jacobian u det A / rho^{n+1}.
//
// The conserving normalization factor is
//     phi = [int rho^q dxi] / [int psi u^alpha rho^{delta + n delta/beta}
//                                  (det A)^{beta/n + 1} dx],
// and a stationary solution has phi * psi u^{alpha-1} rho^delta
// (det A)^{beta/n} identically 1, so the oscillation of that product is a
// scale-free stationarity gap.

#include <vector>

#include "curvflow/grid.hpp"
#include "curvflow/shape.hpp"

namespace curvflow {

double p_exponent(int n, double alpha, double beta);
double q_exponent(int n, double delta, double beta);
double alpha_from_p(int n, double p, double beta);
double delta_from_q(int n, double q, double beta);

// Dual exponent:
//   q > n+1: q/(q-n);  q = n+1: n+1;  1 < q < n+1: nq/(q-1);  0 < q <= 1:
//   +infinity. NaN for q <= 0 (callers never consult it there).
double q_star(int n, double q);

// Precomputed measure data for the functionals at fixed (grid, psi, beta).
struct FunctionalContext {
  std::vector<double> psi;        // anisotropy values per node
  std::vector<double> mu_weight;  // quadrature weight * psi^{-n/beta}
  double mu_total = 0;            // sum of mu_weight
  const Grid* grid = nullptr;

  void init(const Grid& g, const PsiSpec& spec, double beta);
};

double u_p_value(const FunctionalContext& fc, const std::vector<double>& u,
                 double p);
double v_q_value(const FunctionalContext& fc, const SupportGeometry& sg,
                 double q);

// phi as above (serial sums; exactly 1 on the unit ball with psi == 1).
double phi_integral(const FunctionalContext& fc, const SupportGeometry& sg,
                    double alpha, double delta, double beta);

// phi * (sup - inf) of psi u^{alpha-1} rho^delta (det A)^{beta/n}.
double stationarity_gap(const FunctionalContext& fc, const SupportGeometry& sg,
                        double alpha, double delta, double beta, double phi);

// Radial-grid counterparts, used as diagnostics by the radial flows
// (psi == 1 there): direct quadrature in the xi-parametrization.
double v_q_value_radial(const Grid& g, const std::vector<double>& rho,
                        double q);
double u_p_value_radial(const Grid& g, const RadialGeometry& rg, double p);

// Sign-definiteness of (Hess g + g I) for g = psi^{1/(1+beta-alpha)} -- the
// structural condition on the anisotropy under which the k < n stationary
// problems are solvable. Throws ConfigError when 1 + beta - alpha ~ 0.
struct PsiConditionReport {
  bool positive_definite = false;
  bool negative_definite = false;
  double min_eig = 0;  // min over nodes of the smaller eigenvalue
  double max_eig = 0;  // max over nodes of the larger eigenvalue
};
PsiConditionReport check_psi_condition(const Grid& g, const PsiSpec& psi,
                                       double alpha, double beta);

}  // namespace curvflow
