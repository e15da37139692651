// Shooting integrations of the radial equations: the sphere equation in theta,
// its linearization, the flat Emden-Fowler equation in rho and the
// stereographic equation in r co-integrated with its variational equation.
#ifndef EFCAP_INTEGRATE_HPP
#define EFCAP_INTEGRATE_HPP

#include <limits>
#include <optional>

#include "efcap/model.hpp"
#include "efcap/profile.hpp"

namespace efcap {

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  // Series start offset, measured in units of the solution's natural length
  // scale min(1, (c Gamma^(p-1))^(-1/2)).
  double theta_start = 1e-6;
  double max_step = std::numeric_limits<double>::infinity();
  long max_steps = 2'000'000;
  // Repeat sphere shoots at 1/16 of the tolerances and report the change of
  // the first zero as the error estimate.
  bool estimate_error = false;

  /// Throws InvalidArgument when a field is outside its admissible range.
  void validate() const;
  /// Copy with both tolerances divided by `factor`.
  IntegratorConfig tightened(double factor) const;
};

/// Distance from the south pole (in pi - theta, or in 1/r for stereographic
/// shoots) below which a shoot gives up looking for a zero. Closer zeros
/// would need derivatives beyond the double range.
inline constexpr double kSouthPoleFloor = 1e-140;

/// Equation U'' + (N-1) cot(theta) U' + c |U|^(p-1) U = 0. With p = 1 and
/// c = lambda this is the linear eigenvalue equation.
struct SphereProblem {
  int N = 3;
  double p = 2.0;
  double coefficient = 1.0;
};

struct ShootOptions {
  bool stop_at_first_zero = true;
  // With require_zero, reaching theta_end without a zero is a NumericalFailure.
  bool require_zero = true;
  // Upper end of the shoot. Values >= pi mean "until kSouthPoleFloor from the pole".
  double theta_end = 3.141592653589793;
};

/// Integrates from (theta0, U0, U'(theta0) = V0). Beyond the equator the
/// integration continues in the variable pi - theta.
RadialProfile shoot_sphere(const SphereProblem& prob, double theta0, double U0, double V0,
                           const IntegratorConfig& cfg, const ShootOptions& opts = {});

/// Regular shoot co-integrated with W = dU/dGamma, which solves
/// W'' + (N-1) cot(theta) W' + p c |U|^(p-1) W = 0, W(0) = 1.
struct SphereVariation {
  RadialProfile U;
  RadialProfile W;
  double W_at_zero = 0.0;
};
SphereVariation shoot_sphere_variational(const SphereProblem& prob, double Gamma,
                                         const IntegratorConfig& cfg,
                                         const ShootOptions& opts = {});

/// Start offset actually used for a regular shoot from U(0) = Gamma.
double regular_start_offset(const SphereProblem& prob, double Gamma, const IntegratorConfig& cfg);

/// Regular shoot from U(0) = Gamma, U'(0) = 0 with a second-order series start.
RadialProfile shoot_sphere_regular(const SphereProblem& prob, double Gamma,
                                   const IntegratorConfig& cfg, const ShootOptions& opts = {});

/// Regular solution of the sphere equation up to its first zero Theta(Gamma).
RadialProfile integrate_sphere_regular(const Params& params, double Gamma,
                                       const IntegratorConfig& cfg);

/// phi'' + (N-1) cot(theta) phi' + lambda phi = 0, phi(0) = 1. first_zero is
/// empty when phi has no zero before the south pole.
RadialProfile integrate_sphere_linear(int N, double lambda, const IntegratorConfig& cfg);

/// Flat problem u'' + (N-1) u'/rho + |u|^(p-1) u = 0, u(0) = gamma_bar, on
/// (0, rho_max]. Stops at a first zero if one occurs.
RadialProfile integrate_flat_regular(const Params& params, double gamma_bar, double rho_max,
                                     const IntegratorConfig& cfg);

/// The flat singular solution a rho^(-mu) and its first two derivatives.
struct FlatSingularValue {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};
FlatSingularValue flat_singular(const Params& params, double rho);

/// |u'' + (N-1)u'/rho + u^p| for the flat singular solution, divided by the
/// largest of the three terms.
double flat_singular_residual(const Params& params, double rho);

/// Stereographic solution u(r, gamma) with w = du/dgamma.
struct VariationalResult {
  RadialProfile u_profile;
  RadialProfile w_profile;
  double w_at_zero = 0.0;
};

/// gamma = 2^((N-2)/2) Gamma. Integrates
///   u'' + (N-1)u'/r + N(N-2)A^2 u/4 + A^(-q)|u|^(p-1)u = 0,
///   w'' + (N-1)w'/r + N(N-2)A^2 w/4 + p A^(-q)|u|^(p-1) w = 0,
/// with u(0) = gamma, w(0) = 1, up to the first zero R(gamma) of u.
///
/// The pair is computed on the sphere (U and W = dU/dGamma in the theta
/// charts) and mapped by u = A^k U, w = (A/2)^k W, k = (N-2)/2. Directly in r
/// the deviation of u from A^k Gamma that decides R is a relative O(Gamma^(p-1))
/// effect, which the r-frame error control cannot resolve for small gamma.
VariationalResult integrate_variational(const Params& params, double Gamma,
                                        const IntegratorConfig& cfg);

/// The same pair integrated directly in r (and in s = 1/r beyond r = 1,
/// where r^(N-2) u and r^(N-2) w satisfy the same equations). Accurate for
/// moderate gamma only; kept as an independent cross-check.
VariationalResult integrate_variational_stereographic(const Params& params, double Gamma,
                                                      const IntegratorConfig& cfg);

}  // namespace efcap

#endif  // EFCAP_INTEGRATE_HPP
