// Emden phase plane: the flat system y' = z, z' = -alpha z + y - y^p, the cap
// system with the coefficients B0(t), B1(t), Lyapunov and energy functionals,
// the equilibrium (1, 0) and intersection numbers of radial solutions.
#ifndef EFCAP_PHASE_HPP
#define EFCAP_PHASE_HPP

#include <complex>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "efcap/integrate.hpp"
#include "efcap/model.hpp"
#include "efcap/ode.hpp"

namespace efcap {

struct PhaseOrbit {
  bool cap = false;
  std::vector<double> t;
  std::vector<double> y;
  std::vector<double> z;
  std::vector<double> J_trace;
  std::optional<std::vector<double>> E_trace;  // cap orbits only
  std::vector<ode::DenseSegment<2>> segments;
  std::optional<double> zero_time;  // first zero of y (cap orbits stop there)

  /// (y, z) at t from the dense output.
  std::pair<double, double> eval(double t) const;
};

double lyapunov_J(double y, double z, double p);
/// H(y, z) = z^2/2 - (y^2 - 1)/2 + (y^(p+1) - 1)/(p+1); H(1, 0) = 0.
double energy_H(double y, double z, double p);
/// E = H + B0(t) y^(p+1)/(p+1) + B1(t) y^2/2.
double energy_E(double y, double z, double t, const Exponents& exp, int N);

/// Start time at which the asymptote y = (gamma_bar/a) e^(m mu t) equals y0.
double flat_orbit_start_time(const Params& params, double gamma_bar, double y0 = 1e-6);

/// Integrates the flat system from y = (gamma_bar/a) e^(m mu t0), z = m mu y.
/// Requires p > p_S and a start value of at most 1e-6.
PhaseOrbit flat_orbit(const Params& params, double gamma_bar, std::pair<double, double> t_span,
                      const IntegratorConfig& cfg);

/// Emden image of the regular cap solution with centre value gamma (the
/// stereographic u(0)): y = 2^(-q/(p-1)) u r^mu / a, t = log(r)/m. Integrates
///   z' = -alpha z + y - y^p - B0(t) y^p - B1(t) y
/// from the asymptote at t0 up to the first zero of y or t_end.
PhaseOrbit cap_orbit(const Params& params, double gamma, std::pair<double, double> t_span,
                     const IntegratorConfig& cfg);
double cap_orbit_start_time(const Params& params, double gamma, double y0 = 1e-6);

struct EquilibriumReport {
  double y = 1.0;
  double z = 0.0;
  std::complex<double> lambda_plus;
  std::complex<double> lambda_minus;
  double discriminant = 0.0;  // alpha^2 - 4(p-1)
  bool spiral = false;
};

/// Roots of lambda^2 + alpha lambda + (p-1) = 0. Requires p >= p_S.
EquilibriumReport equilibrium_report(const Exponents& exp, double p);

/// A function with its derivative, for intersection counting.
struct Curve {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
};
Curve curve_of(const RadialProfile& profile);

struct Crossing {
  double x = 0.0;
  double slope = 0.0;  // derivative of a - b at x
  bool simple = false;
};

struct IntersectionResult {
  int count = 0;          // certified simple sign changes
  int indeterminate = 0;  // sign changes whose simplicity is not certified
  std::vector<Crossing> crossings;
};

/// Sign changes of a - b sampled on `grid` (increasing). A crossing is
/// certified simple when |a' - b'| > 1e3 * noise * (|a'| + |b'|).
IntersectionResult intersection_count(const Curve& a, const Curve& b,
                                      const std::vector<double>& grid, double noise = 1e-9);

/// Both profiles on the same variable. The grid is the union of their nodes
/// in (lo, hi), each gap split into `refine` parts.
IntersectionResult intersection_count(const RadialProfile& a, const RadialProfile& b,
                                      std::pair<double, double> interval, int refine = 4,
                                      double noise = 1e-9);

/// Flat regular solution with centre value gamma_bar against a rho^(-mu) on
/// (rho_lo, rho_max), sampled at the regular solution's nodes split `refine` ways.
IntersectionResult flat_intersections(const Params& params, double gamma_bar, double rho_lo,
                                      double rho_max, const IntegratorConfig& cfg,
                                      int refine = 1);

/// Regular cap solution with stereographic centre value gamma against U* in
/// theta, up to the first of the two zeros. U* is started at
/// min(1e-4, 1e-3 gamma^(-(p-1)/2)), inside the regular solution's core.
IntersectionResult cap_intersections(const Params& params, double gamma, const IntegratorConfig& cfg,
                                     int refine = 4);

/// Epsilon of the trapping experiments: {H < 2 eps} stays inside 0 < y < xi.
double trapping_epsilon(double p);

struct TrappingReport {
  bool entered = false;
  double t_enter = 0.0;
  double t_horizon = 0.0;  // last time with xi^(p+1)/(p+1) B0, xi^2/2 B1 <= eps/8
  double max_H_after = 0.0;
  bool stayed = false;  // H < 2 eps on [t_enter, t_horizon]
  double energy_increase = 0.0;  // E(t_horizon) - E(t_enter)
  double energy_bound = 0.0;     // xi^(p+1)/(p+1) B0(T) + xi^2/2 B1(T)
};

TrappingReport trapping_monitor(const PhaseOrbit& orbit, const Params& params, double eps);

}  // namespace efcap

#endif  // EFCAP_PHASE_HPP
