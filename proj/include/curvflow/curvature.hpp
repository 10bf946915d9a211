#pragma once

// Symmetric curvature functions f of the principal curvatures or principal
// radii, for hypersurfaces in R^{n+1} with n <= 2. Three families:
//
//   sigma_k_root  f = sigma_k(lam)^{1/k}         cone: sigma_1..sigma_k > 0
//   quotient      f = (sigma_l/sigma_k)^{1/(l-k)} with 0 <= k < l <= n,
//                                                 cone: sigma_1..sigma_l > 0
//   power_mean    f = ((lam_1^m+..+lam_n^m)/n)^{1/m}, m < 0, cone: lam_i > 0
//
// All are positive, strictly monotone (df/dlam_i > 0) and 1-homogeneous on
// their cones, with f(1,...,1) > 0.
//
// `argument` records which quantity the family is evaluated on. Flows that
// use f(kappa)^{-beta} (principal curvatures) normalize with
// eta = f(1,..,1)^{-beta}; flows that use sigma_k(lam)^{beta/k} (principal
// radii, i.e. eigenvalues of Hess u + u I) normalize with
// eta = sigma_k(1,..,1)^{beta/k} = binom(n,k)^{beta/k}. The engine selects
// the convention from this tag and rejects mismatched combinations.

namespace curvflow {

enum class CurvatureKind { sigma_k_root, quotient, power_mean };
enum class CurvatureArgument { principal_curvatures, principal_radii };

struct CurvatureSpec {
  CurvatureKind kind = CurvatureKind::sigma_k_root;
  CurvatureArgument argument = CurvatureArgument::principal_curvatures;
  int k = 1;      // sigma_k_root order; quotient lower index
  int l = 2;      // quotient upper index
  double m = -1;  // power_mean exponent

  void validate(int n) const;  // throws ConfigError on a bad combination
};

// Elementary symmetric polynomial sigma_k (lam2 ignored for n=1; sigma_0=1).
double sigma_k(int n, int k, double lam1, double lam2);

// d sigma_k / d lam_i.
void sigma_k_grad(int n, int k, double lam1, double lam2, double& d1,
                  double& d2);

// Whether (lam1, lam2) lies in the definition cone of the family.
bool in_cone(const CurvatureSpec& spec, int n, double lam1, double lam2);

struct CurvatureEval {
  double f = 0;
  double df1 = 0, df2 = 0;  // partials w.r.t. lam1, lam2
};

// f and grad f at a cone point. No cone check here (callers check first).
CurvatureEval eval_curvature(const CurvatureSpec& spec, int n, double lam1,
                             double lam2);

// f(1,...,1).
double unit_value(const CurvatureSpec& spec, int n);

// Normalizing constants (see header comment): the two eta conventions.
double eta_kappa(const CurvatureSpec& spec, int n, double beta);
double eta_lambda(int n, int k, double beta);

}  // namespace curvflow
