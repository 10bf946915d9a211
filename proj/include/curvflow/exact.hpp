#pragma once

// Closed-form reference solutions for origin-centred balls and the
// normalization schedules built from them.
//
// Under the un-normalized flows an origin-centred ball of radius r stays a
// ball and its radius obeys the scalar ODE
//
//     dr/dt = eta * r^sigma,        sigma = alpha + delta + beta,
//
// where eta is the speed of the unit ball (it depends on the curvature
// family and on whether it is evaluated on principal curvatures or principal
// radii; see curvature.hpp). Everything in this header is the exact solution
// of that ODE and its consequences:
//
//   ball_radius   r(t) with r(0)=r0 ("Theta")
//   phi_schedule  the normalizing factor phi(t), i.e. ball_radius with r0=1
//   blow_up_time  T* for sigma>1 (r(t) -> infinity as t -> T*)
//   tau_of_t      the stretched time tau with d tau/dt = phi^{sigma-1}
//
// sigma = 1 is the exponential branch; the formulas below switch on it.

namespace curvflow::exact {

inline double sigma_total(double alpha, double delta, double beta) {
  return alpha + delta + beta;
}

// Exact radius at time t of an origin-centred ball with initial radius r0:
//   sigma == 1 : r0 * exp(eta t)
//   sigma != 1 : ( r0^{1-sigma} + (1-sigma) eta t )^{1/(1-sigma)}
double ball_radius(double r0, double t, double eta, double sigma);

// phi(t) = ball_radius(1, t, eta, sigma); phi(0) = 1.
double phi_schedule(double t, double eta, double sigma);

// Finite-time blow-up time of the ball radius for sigma > 1:
//   T* = r0^{1-sigma} / ((sigma-1) eta).
// Requires sigma > 1 (throws ConfigError otherwise).
double blow_up_time(double r0, double eta, double sigma);

// Stretched time tau(t) with d tau/dt = phi(t)^{sigma-1}, tau(0) = 0:
//   sigma == 1 : t
//   sigma != 1 : log1p((1-sigma) eta t) / ((1-sigma) eta)
// For sigma > 1 this is finite-time-to-infinite-time: tau -> infinity as
// t -> T*(r0=1).
double tau_of_t(double t, double eta, double sigma);

}  // namespace curvflow::exact
