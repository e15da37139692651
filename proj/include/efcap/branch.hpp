// The bifurcation map Gamma -> Theta(Gamma): point evaluations, adaptive
// branch tracing with turning-point brackets, oscillation counting and the
// inverse map in the (sub)critical range.
#ifndef EFCAP_BRANCH_HPP
#define EFCAP_BRANCH_HPP

#include <string>
#include <utility>
#include <vector>

#include "efcap/integrate.hpp"
#include "efcap/model.hpp"

namespace efcap {

struct BranchPoint {
  double Gamma = 0.0;
  double gamma = 0.0;  // 2^((N-2)/2) Gamma
  double Theta = 0.0;
  double Theta_complement = 0.0;  // pi - Theta, kept separately for zeros near the pole
  double R = 0.0;                 // tan(Theta/2)
  int slope_sign = 0;             // sign of dTheta/dGamma from the variational solution
  double w_end = 0.0;             // w(R(gamma)) in the stereographic frame
  double theta_error = 0.0;       // error estimate of Theta
};

struct TurningBracket {
  double Gamma_low = 0.0;
  double Gamma_high = 0.0;
};

struct BranchFailure {
  double Gamma = 0.0;
  std::string message;
};

struct Branch {
  Params params;
  std::vector<BranchPoint> points;  // strictly increasing in Gamma
  std::vector<TurningBracket> turning_points;
  double theta_min = 0.0;
  double theta_min_Gamma = 0.0;
  int oscillation_count = -1;  // -1 until counted against a Theta*
  // Above the largest Theta seen at a turning point every computed Theta is
  // attained once. Equal to theta_min's branch end when no turning point exists.
  double single_valued_above = 0.0;
  std::vector<BranchFailure> failures;
};

struct BranchOptions {
  double bracket_width = 1e-4;        // turning brackets are refined to this width in ln Gamma
  int dense_per_decade = 200;         // densification around suspected turning points
  int max_hidden_refinements = 6;     // bisection depth when searching hidden turning pairs
  unsigned threads = 0;               // 0: hardware concurrency
};

/// Theta(Gamma) with the slope sign from the variational equation.
BranchPoint theta_of_gamma(const Params& params, double Gamma, const IntegratorConfig& cfg);

Branch trace_branch(const Params& params, double Gamma_min, double Gamma_max, int n_points,
                    const IntegratorConfig& cfg, const BranchOptions& opts = {});

/// Sign changes of Theta_i - theta_star along the branch, skipping points
/// within dead_band of theta_star.
int oscillation_count(const Branch& branch, double theta_star, double dead_band = 1e-9);
int oscillation_count(const std::vector<double>& thetas, double theta_star,
                      double dead_band = 1e-9);

/// The unique Gamma with Theta(Gamma) = Theta_target for 1 < p <= p_S, to
/// relative accuracy 1e-10. The problem may carry a coefficient c in front of
/// the nonlinearity. Throws OutOfRange when the target is not attained.
double gamma_of_theta(const SphereProblem& prob, double Theta_target, const IntegratorConfig& cfg);
double gamma_of_theta(const Params& params, double Theta_target, const IntegratorConfig& cfg);

/// Upper estimate of the infimum of Theta over the branch.
struct ThetaMinEstimate {
  double theta_min = 0.0;
  double Gamma = 0.0;
  double Gamma_low = 0.0;   // neighbouring grid values bracketing the minimum
  double Gamma_high = 0.0;
};
ThetaMinEstimate underline_theta_estimate(const Branch& branch);

/// Centered difference of Theta in Gamma with step h = rel_step * Gamma and
/// an error estimate combining the shoot errors and the change against 2h.
struct SlopeEstimate {
  double slope = 0.0;
  double error = 0.0;
};
SlopeEstimate finite_difference_slope(const Params& params, double Gamma, double rel_step,
                                      const IntegratorConfig& cfg);

}  // namespace efcap

#endif  // EFCAP_BRANCH_HPP
