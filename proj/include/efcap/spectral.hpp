// First Dirichlet eigenvalue of the cap, Bessel and closed-form checks, the
// Rayleigh identity of the linearized stereographic operator, the Pohozaev
// functional with nonexistence certificates and the p -> 1 limit objects.
#ifndef EFCAP_SPECTRAL_HPP
#define EFCAP_SPECTRAL_HPP

#include <functional>
#include <utility>
#include <vector>

#include "efcap/integrate.hpp"
#include "efcap/model.hpp"

namespace efcap {

struct EigenResult {
  int N = 3;
  double Theta = 0.0;
  double lambda1 = 0.0;
  RadialProfile phi_profile;  // phi(0) = 1, first zero at Theta
  std::pair<double, double> bracket;
};

/// phi'' + (N-1) cot(theta) phi' + lambda phi = 0 on (0, Theta), phi'(0) = 0,
/// phi(Theta) = 0, phi > 0. Root search in lambda on the first zero of the
/// linear shoot, starting from [1e-6, 4N] and doubling the upper end.
/// Throws NumericalFailure when no bracket is found (Theta too close to 0 or pi).
EigenResult lambda1(int N, double Theta, const IntegratorConfig& cfg);

/// First positive zero of J_{N/2-1}.
double bessel_zero(int N);

struct BesselSample {
  double lambda = 0.0;
  double r1 = 0.0;       // first zero of the stereographic eigenfunction
  double product = 0.0;  // 2 sqrt(lambda) r1
};

/// 2 sqrt(lambda) r1(lambda) for each lambda; tends to bessel_zero(N).
std::vector<BesselSample> bessel_limit_check(int N, const std::vector<double>& lambda_list,
                                             const IntegratorConfig& cfg);

struct RayleighCheck {
  double H_of_u = 0.0;         // quadratic form at u
  double integral_form = 0.0;  // -(p-1) int A^(-q) u^(p+1) r^(N-1)
  double relative_difference = 0.0;
};

/// Both sides of the Rayleigh identity for a stereographic solution u(r) that
/// ends at its first zero. Each node interval is split into `subdivisions`
/// Gauss-Kronrod cells.
RayleighCheck rayleigh_check(const Params& params, const RadialProfile& r_profile,
                             int subdivisions = 1);

/// max |(L + N A^2) psi0| over the grid, psi0 = A^k (A - 1), with
/// L = d^2/dr^2 + (N-1)/r d/dr + N(N-2)A^2/4.
double psi0_residual(int N, const std::vector<double>& r_grid);
double psi0(int N, double r);

/// sin^(N-2)(theta) * int_theta^Theta sin^(1-N)(phi) dphi, by composite
/// adaptive quadrature on cells refined geometrically toward 0 and pi.
double scaled_inverse_sine_integral(int N, double theta, double Theta);

/// F(theta) = cos(theta) sin^(N-2)(theta) int_theta^Theta sin^(1-N).
double pohozaev_F(int N, double theta, double Theta);

struct PohozaevTrace {
  std::vector<double> theta_grid;
  std::vector<double> H_values;
  std::vector<double> F_values;
  double F_sup = 0.0;   // over the grid
  double scale = 0.0;   // sup over the grid of the three summands' magnitudes
  double H_start = 0.0;  // at the first node
  double H_end = 0.0;    // at the first zero
};

/// H(theta) = -U'^2 sin^(2N-2) I - U U' sin^(N-1) - 2/(p+1) U^(p+1) sin^(2N-2) I,
/// I = int_theta^Theta sin^(1-N), on the profile nodes up to its first zero.
PohozaevTrace pohozaev_trace(const Params& params, const RadialProfile& profile);

/// H at an arbitrary theta of the profile (dense evaluation).
double pohozaev_H(const Params& params, const RadialProfile& profile, double theta);

struct FSup {
  double value = 0.0;
  double theta = 0.0;  // 0 when the supremum is the limit at 0+
};

/// sup of F over (0, Theta]: 1e4-point sampling, Brent refinement around the
/// three largest samples, and the limit 1/(N-2) at 0+.
FSup pohozaev_F_sup(int N, double Theta);

/// True iff (p+3)/(4N-4) > sup F + 1e-9, which rules out a solution on the
/// cap of radius Theta.
bool nonexistence_certificate(int N, double p, double Theta);

struct RegionCell {
  double Theta = 0.0;
  double p = 0.0;
  double F_sup = 0.0;
  bool certified = false;
};
std::vector<RegionCell> nonexistence_region(int N, const std::vector<double>& thetas,
                                            const std::vector<double>& ps);

/// Theta with lambda1(Theta) = 1.
double theta_dagger(int N, const IntegratorConfig& cfg);

/// exp(-int phi^2 log(phi) sin^(N-1) / int phi^2 sin^(N-1)) over (0, Theta)
/// for a given eigenfunction phi with phi(0) = 1 vanishing at Theta.
double gamma_dagger_from(const std::function<double(double)>& phi, int N, double Theta);

/// The same functional for the shooting eigenfunction at Theta_dagger.
double gamma_dagger(int N, const IntegratorConfig& cfg);

/// Gamma(p) with Theta(Gamma) = Theta for each p in (1, p_S).
std::vector<std::pair<double, double>> gamma_p_trend(int N, double Theta,
                                                     const std::vector<double>& p_list,
                                                     const IntegratorConfig& cfg);

}  // namespace efcap

#endif  // EFCAP_SPECTRAL_HPP
