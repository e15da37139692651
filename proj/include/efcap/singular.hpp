// The singular solution U* blowing up like a theta^(-mu) at the pole, its
// first zero Theta*, and convergence of regular solutions towards it.
#ifndef EFCAP_SINGULAR_HPP
#define EFCAP_SINGULAR_HPP

#include <vector>

#include "efcap/integrate.hpp"
#include "efcap/model.hpp"

namespace efcap {

struct SingularStart {
  double U0 = 0.0;
  double dU0 = 0.0;
};

/// Leading-order asymptotics at theta0:
///   U0  = a cos(theta0/2)^(-(N-2)) (2 tan(theta0/2))^(-mu),
///   dU0 = a cos(theta0/2)^(-N) (2 tan(theta0/2))^(-mu-1) (-mu + (N-2) sin^2(theta0/2)).
/// Requires p > p_S and theta0 in (0, 1e-2].
SingularStart singular_start_values(const Params& params, double theta0);

/// Shoot from the asymptotic start at theta0 up to the first zero of U*.
RadialProfile integrate_singular(const Params& params, double theta0, const IntegratorConfig& cfg);

struct SingularOptions {
  double theta0 = 1e-4;
  int halvings = 2;
  // The two finest starts must give zeros closer than this.
  double convergence_tol = 1e-6;
};

struct SingularProfile {
  Params params;
  double theta_start = 0.0;  // start of the stored (finest) profile
  RadialProfile profile;
  double Theta_star = 0.0;
  double Theta_star_complement = 0.0;
  double R_star = 0.0;
  double refinement_estimate = 0.0;  // |Theta*(theta0/2) - Theta*(theta0)|
  double observed_order = 0.0;       // 0 when the differences are at noise level
  std::vector<double> raw_zeros;     // Theta* at theta0, theta0/2, ...
};

/// Throws NumericalFailure when the two finest starts disagree by more than
/// opts.convergence_tol.
SingularProfile compute_theta_star(const Params& params, const IntegratorConfig& cfg,
                                   const SingularOptions& opts = {});

/// Least-squares slope of log|y*(t) - 1| against t over the window where
/// r lies in [r_lo, r_hi]. The Emden variables come from the stereographic
/// image of the profile. Throws InvalidArgument if the window holds fewer than
/// 8 samples.
struct DecayFit {
  double rate = 0.0;
  double y_minus_one_at_start = 0.0;  // |y*(t) - 1| at the first profile node
  int samples = 0;
};
DecayFit asymptotic_decay_check(const SingularProfile& sing, const Exponents& exp,
                                double r_lo = 0.0, double r_hi = 0.05);

struct ConvergenceRow {
  double gamma = 0.0;
  double sup_distance = 0.0;  // sup |u(r, gamma) - u*(r)| over [r0, min(R, R*)]
  double zero_gap = 0.0;      // |R(gamma) - R*|
  bool below_singular_at_r0 = false;
};

/// gamma is the stereographic centre value 2^((N-2)/2) Gamma.
std::vector<ConvergenceRow> convergence_study(const SingularProfile& sing,
                                              const std::vector<double>& gamma_list, double r0,
                                              const IntegratorConfig& cfg, int samples = 2000);

}  // namespace efcap

#endif  // EFCAP_SINGULAR_HPP
