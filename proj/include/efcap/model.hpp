// Problem data, derived exponents, regime classification and the changes of
// variables between the sphere, stereographic and Emden coordinates.
#ifndef EFCAP_MODEL_HPP
#define EFCAP_MODEL_HPP

#include <optional>
#include <string_view>
#include <vector>

#include "efcap/profile.hpp"

namespace efcap {

/// Dimension N of the sphere S^N and exponent p of the nonlinearity.
struct Params {
  int N = 3;
  double p = 2.0;

  /// Throws InvalidArgument unless N >= 3 and p > 1.
  void validate() const;
};

/// Constants derived from (N, p).
///
/// a, m and alpha need N - 2 - mu > 0 and are populated for p >= p_S only;
/// beta is populated when additionally the equilibrium (1, 0) of the Emden
/// system is a spiral.
struct Exponents {
  double p_S = 0.0;   // (N+2)/(N-2)
  double p_JL = 0.0;  // +inf for N <= 10
  double mu = 0.0;    // 2/(p-1)
  double q = 0.0;     // (N-2)(p - p_S)/2
  std::optional<double> a;
  std::optional<double> m;
  std::optional<double> alpha;
  std::optional<double> beta;
};

enum class Criticality { Subcritical, Critical, Supercritical };
enum class JLPosition { BelowJL, AtOrAboveJL };

struct Regime {
  Criticality criticality = Criticality::Subcritical;
  JLPosition jl_position = JLPosition::BelowJL;
  bool spiral = false;
};

std::string_view to_string(Criticality c);
std::string_view to_string(JLPosition j);

double sobolev_exponent(int N);
double joseph_lundgren_exponent(int N);

Exponents compute_exponents(const Params& params);
Regime classify(const Params& params);

/// Positive y-intercept of {J = 0}: ((p+1)/2)^(1/(p-1)).
double xi_intercept(double p);

/// Coefficients of the cap Emden equation
///   y'' + alpha y' - y + y^p + B0(t) y^p + B1(t) y = 0,   t = log(r)/m.
/// B1 carries the factor m^2 produced by the time rescaling t = log(r)/m.
struct CapCoefficients {
  double B0 = 0.0;
  double B1 = 0.0;
  double dB0 = 0.0;  // d/dt
  double dB1 = 0.0;
};

/// Requires exponents with m populated. Stable for |2mt| beyond 700.
CapCoefficients cap_coefficients(double t, const Exponents& exp, int N);

/// A(r) = 2/(1+r^2).
inline double conformal_factor(double r) { return 2.0 / (1.0 + r * r); }

/// r = tan(theta/2), computed from pi - theta when that is more accurate.
double stereographic_r(double theta, double theta_complement);

/// u(r) = A(r)^((N-2)/2) U(theta) with r = tan(theta/2); node-wise on the
/// profile grid. Rejects theta >= pi.
RadialProfile stereographic_u_from_U(const RadialProfile& theta_profile, int N);

/// Inverse of stereographic_u_from_U.
RadialProfile stereographic_U_from_u(const RadialProfile& r_profile, int N);

/// Emden variables y(t) = 2^(-q/(p-1)) u(r) r^mu / a and z = dy/dt at
/// t = log(r)/m. For flat profiles q is taken as zero.
struct EmdenSamples {
  std::vector<double> t;
  std::vector<double> y;
  std::vector<double> z;
};

EmdenSamples emden_from_u(const RadialProfile& profile, const Exponents& exp);

}  // namespace efcap

#endif  // EFCAP_MODEL_HPP
