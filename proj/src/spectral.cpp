#include "efcap/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "efcap/branch.hpp"
#include "efcap/error.hpp"

namespace efcap {

namespace {

constexpr double kPi = std::numbers::pi;
using GK21 = boost::math::quadrature::gauss_kronrod<double, 21>;
using GK15 = boost::math::quadrature::gauss_kronrod<double, 15>;

void check_dimension(int N) {
  if (N < 3) throw InvalidArgument("N must be at least 3");
}

void check_cap(double Theta) {
  if (!(Theta > 0.0 && Theta < kPi)) throw InvalidArgument("Theta must lie in (0, pi)");
}

std::optional<double> linear_zero(int N, double lambda, const IntegratorConfig& cfg) {
  return integrate_sphere_linear(N, lambda, cfg).first_zero;
}

// int_a^b (s0 / sin phi)^(N-2) / sin phi on one cell. Callers keep b/a and
// (pi-a)/(pi-b) below about 2, where a single 21-point Kronrod rule is
// accurate to rounding.
double scaled_cell(int N, double s0, double a, double b) {
  if (!(b > a)) return 0.0;
  auto g = [=](double phi) {
    const double s = std::sin(phi);
    return std::pow(s0 / s, N - 2.0) / s;
  };
  return GK21::integrate(g, a, b, 0);
}

// sin of a node, taken from the complement beyond the equator.
double node_sin(const RadialProfile& prof, std::size_t i) {
  const double th = prof.grid[i];
  if (th > kPi / 2 && i < prof.complement.size()) return std::sin(prof.complement[i]);
  return std::sin(th);
}

// The three summands of H given U, U', sin(theta) and S = sin^(N-2) * I.
std::array<double, 3> pohozaev_terms(int N, double p, double U, double dU, double s, double S) {
  const double sN = std::pow(s, N);
  return {-dU * dU * sN * S, -U * dU * std::pow(s, N - 1.0),
          -2.0 / (p + 1.0) * std::pow(std::abs(U), p + 1.0) * sN * S};
}

double theta_end_of(const RadialProfile& profile) {
  if (profile.kind != ProfileKind::ThetaOnSphere)
    throw InvalidArgument("Pohozaev functional needs a theta-frame profile");
  if (!profile.first_zero) throw InvalidArgument("profile has no first zero");
  return *profile.first_zero;
}

}  // namespace

EigenResult lambda1(int N, double Theta, const IntegratorConfig& cfg) {
  check_dimension(N);
  check_cap(Theta);
  cfg.validate();

  // The first zero moves toward 0 as lambda grows (Sturm comparison).
  double lo = 1e-6;
  std::optional<double> zlo = linear_zero(N, lo, cfg);
  if (zlo && *zlo <= Theta)
    throw NumericalFailure("no lambda bracket: Theta is too close to pi");
  double hi = 4.0 * N;
  for (;;) {
    const auto z = linear_zero(N, hi, cfg);
    if (z && *z < Theta) break;
    lo = hi;
    zlo = z;
    hi *= 2.0;
    if (hi > 1e16) throw NumericalFailure("no lambda bracket: Theta is too close to 0");
  }
  while (!zlo) {
    const double mid = std::sqrt(lo * hi);
    const auto z = linear_zero(N, mid, cfg);
    if (z && *z < Theta) {
      hi = mid;
    } else {
      lo = mid;
      zlo = z;
    }
  }

  auto f = [&](double lam) {
    const auto z = linear_zero(N, lam, cfg);
    return z ? *z - Theta : kPi - Theta;
  };
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(
      f, lo, hi, *zlo - Theta, *linear_zero(N, hi, cfg) - Theta,
      boost::math::tools::eps_tolerance<double>(52), iters);

  EigenResult out;
  out.N = N;
  out.Theta = Theta;
  out.bracket = {a, b};
  out.lambda1 = 0.5 * (a + b);
  out.phi_profile = integrate_sphere_linear(N, out.lambda1, cfg);
  if (!out.phi_profile.first_zero) throw NumericalFailure("eigenfunction lost its zero");
  return out;
}

double bessel_zero(int N) {
  check_dimension(N);
  return boost::math::cyl_bessel_j_zero(N / 2.0 - 1.0, 1);
}

std::vector<BesselSample> bessel_limit_check(int N, const std::vector<double>& lambda_list,
                                             const IntegratorConfig& cfg) {
  check_dimension(N);
  std::vector<BesselSample> out;
  for (double lam : lambda_list) {
    const RadialProfile pr = integrate_sphere_linear(N, lam, cfg);
    if (!pr.first_zero) throw InvalidArgument("lambda too small for a zero of the eigenfunction");
    BesselSample s;
    s.lambda = lam;
    s.r1 = stereographic_r(*pr.first_zero, *pr.first_zero_complement);
    s.product = 2.0 * std::sqrt(lam) * s.r1;
    out.push_back(s);
  }
  return out;
}

RayleighCheck rayleigh_check(const Params& params, const RadialProfile& r_profile,
                             int subdivisions) {
  params.validate();
  if (r_profile.kind != ProfileKind::RStereographic)
    throw InvalidArgument("Rayleigh check needs a stereographic profile");
  if (!r_profile.first_zero) throw InvalidArgument("profile has no first zero");
  if (subdivisions < 1) throw InvalidArgument("subdivisions must be positive");
  const int N = params.N;
  const double p = params.p;
  const double q = compute_exponents(params).q;
  const double lin = N * (N - 2.0) / 4.0;

  auto pieces = [&](double r, double u, double du) {
    const double A = conformal_factor(r);
    const double w = std::pow(r, N - 1.0);
    const double up = std::pow(std::abs(u), p - 1.0) * std::pow(A, -q);
    return std::pair{(du * du - lin * A * A * u * u - p * up * u * u) * w, up * u * u * w};
  };
  // Below the first node u is constant to O(r^2).
  const double r0 = r_profile.lower(), u0 = r_profile.value.front();
  const double vol = std::pow(r0, N) / N;
  const double up0 = std::pow(u0, p - 1.0) * std::pow(2.0, -q);
  double H = (-lin * 4.0 * u0 * u0 - p * up0 * u0 * u0) * vol;
  double I = up0 * u0 * u0 * vol;
  const double R = *r_profile.first_zero;
  for (std::size_t i = 0; i + 1 < r_profile.grid.size(); ++i) {
    const double x0 = r_profile.grid[i], x1 = std::min(r_profile.grid[i + 1], R);
    for (int j = 0; j < subdivisions; ++j) {
      const double a = x0 + (x1 - x0) * j / subdivisions;
      const double b = x0 + (x1 - x0) * (j + 1) / subdivisions;
      if (!(b > a)) continue;
      H += GK15::integrate(
          [&](double r) { return pieces(r, r_profile.value_at(r), r_profile.derivative_at(r)).first; },
          a, b, 0);
      I += GK15::integrate(
          [&](double r) { return pieces(r, r_profile.value_at(r), r_profile.derivative_at(r)).second; },
          a, b, 0);
    }
  }
  RayleighCheck out;
  out.H_of_u = H;
  out.integral_form = -(p - 1.0) * I;
  out.relative_difference = std::abs(H - out.integral_form) / std::abs(out.integral_form);
  return out;
}

double psi0(int N, double r) {
  const double A = conformal_factor(r);
  return std::pow(A, (N - 2.0) / 2.0) * (A - 1.0);
}

double psi0_residual(int N, const std::vector<double>& r_grid) {
  check_dimension(N);
  const double k = (N - 2.0) / 2.0;
  double worst = 0.0;
  for (double r : r_grid) {
    if (!(r > 0.0)) throw InvalidArgument("r_grid must lie in (0, inf)");
    const double A = conformal_factor(r);
    const double dA = -r * A * A;
    const double d2A = -A * A + 2.0 * r * r * A * A * A;
    // psi0 = f(A) with f(A) = A^(k+1) - A^k.
    const double f = std::pow(A, k + 1) - std::pow(A, k);
    const double f1 = (k + 1) * std::pow(A, k) - k * std::pow(A, k - 1);
    const double f2 = (k + 1) * k * std::pow(A, k - 1) - k * (k - 1) * std::pow(A, k - 2);
    const double d1 = f1 * dA;
    const double d2 = f2 * dA * dA + f1 * d2A;
    const double res = d2 + (N - 1.0) / r * d1 + (N * (N - 2.0) / 4.0 + N) * A * A * f;
    worst = std::max(worst, std::abs(res));
  }
  return worst;
}

double scaled_inverse_sine_integral(int N, double theta, double Theta) {
  check_dimension(N);
  check_cap(Theta);
  if (!(theta > 0.0 && theta <= Theta)) throw InvalidArgument("theta must lie in (0, Theta]");
  if (theta == Theta) return 0.0;
  // Cells double in size away from theta and away from pi, where the
  // integrand varies like a power of the distance.
  std::vector<double> cuts{theta};
  const double mid = std::max(theta, std::min(Theta, kPi / 2));
  for (double x = 2.0 * theta; x < mid; x *= 2.0) cuts.push_back(x);
  cuts.push_back(mid);
  std::vector<double> top;
  for (double d = 2.0 * (kPi - Theta); kPi - d > mid; d *= 2.0) top.push_back(kPi - d);
  cuts.insert(cuts.end(), top.rbegin(), top.rend());
  cuts.push_back(Theta);
  const double s0 = std::sin(theta);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) sum += scaled_cell(N, s0, cuts[i], cuts[i + 1]);
  return sum;
}

double pohozaev_F(int N, double theta, double Theta) {
  return std::cos(theta) * scaled_inverse_sine_integral(N, theta, Theta);
}

double pohozaev_H(const Params& params, const RadialProfile& profile, double theta) {
  params.validate();
  const double Theta = theta_end_of(profile);
  const double S = scaled_inverse_sine_integral(params.N, theta, Theta);
  const auto t = pohozaev_terms(params.N, params.p, profile.value_at(theta),
                                profile.derivative_at(theta), std::sin(theta), S);
  return t[0] + t[1] + t[2];
}

PohozaevTrace pohozaev_trace(const Params& params, const RadialProfile& profile) {
  params.validate();
  const int N = params.N;
  const double Theta = theta_end_of(profile);
  std::size_t n = 0;
  while (n < profile.grid.size() && profile.grid[n] <= Theta) ++n;
  if (n < 2) throw InvalidArgument("profile has fewer than two nodes before its zero");

  // S_i = sin^(N-2)(theta_i) * I(theta_i), accumulated from the zero downward:
  // S_i = (s_i/s_{i+1})^(N-2) S_{i+1} + int_{theta_i}^{theta_{i+1}} (s_i/sin)^(N-2)/sin.
  std::vector<double> S(n, 0.0);
  for (std::size_t i = n - 1; i-- > 0;) {
    const double si = node_sin(profile, i), sj = node_sin(profile, i + 1);
    S[i] = std::pow(si / sj, N - 2.0) * S[i + 1] +
           scaled_cell(N, si, profile.grid[i], profile.grid[i + 1]);
  }

  PohozaevTrace out;
  out.F_sup = -INFINITY;
  for (std::size_t i = 0; i < n; ++i) {
    const auto t = pohozaev_terms(N, params.p, profile.value[i], profile.derivative[i],
                                  node_sin(profile, i), S[i]);
    out.theta_grid.push_back(profile.grid[i]);
    out.H_values.push_back(t[0] + t[1] + t[2]);
    const double cosine = profile.grid[i] > kPi / 2 && i < profile.complement.size()
                              ? -std::cos(profile.complement[i])
                              : std::cos(profile.grid[i]);
    out.F_values.push_back(cosine * S[i]);
    out.F_sup = std::max(out.F_sup, out.F_values.back());
    out.scale = std::max({out.scale, std::abs(t[0]), std::abs(t[1]), std::abs(t[2])});
  }
  out.H_start = out.H_values.front();
  out.H_end = out.H_values.back();
  return out;
}

FSup pohozaev_F_sup(int N, double Theta) {
  check_dimension(N);
  check_cap(Theta);
  constexpr int kSamples = 10000;
  std::vector<double> th(kSamples), F(kSamples);
  double S = 0.0;
  for (int i = kSamples; i-- > 0;) {
    th[i] = Theta * (i + 1) / kSamples;
    if (i + 1 < kSamples) {
      const double si = std::sin(th[i]), sj = std::sin(th[i + 1]);
      S = std::pow(si / sj, N - 2.0) * S + scaled_cell(N, si, th[i], th[i + 1]);
    }
    F[i] = std::cos(th[i]) * S;
  }
  std::vector<int> order(kSamples);
  for (int i = 0; i < kSamples; ++i) order[i] = i;
  std::partial_sort(order.begin(), order.begin() + 3, order.end(),
                    [&](int a, int b) { return F[a] > F[b]; });

  FSup best{1.0 / (N - 2.0), 0.0};
  for (int j = 0; j < 3; ++j) {
    const int i = order[j];
    const double a = i > 0 ? th[i - 1] : 0.5 * th[0];
    const double b = i + 1 < kSamples ? th[i + 1] : Theta;
    const auto [x, negF] = boost::math::tools::brent_find_minima(
        [&](double t) { return -pohozaev_F(N, t, Theta); }, a, b, 52);
    const double v = std::max(-negF, F[i]);
    if (v > best.value) best = {v, -negF >= F[i] ? x : th[i]};
  }
  return best;
}

bool nonexistence_certificate(int N, double p, double Theta) {
  check_dimension(N);
  check_cap(Theta);
  if (!(p > 1.0)) throw InvalidArgument("p must exceed 1");
  return (p + 3.0) / (4.0 * N - 4.0) > pohozaev_F_sup(N, Theta).value + 1e-9;
}

std::vector<RegionCell> nonexistence_region(int N, const std::vector<double>& thetas,
                                            const std::vector<double>& ps) {
  check_dimension(N);
  std::vector<RegionCell> out;
  for (double Theta : thetas) {
    const double sup = pohozaev_F_sup(N, Theta).value;
    for (double p : ps) {
      if (!(p > 1.0)) throw InvalidArgument("p must exceed 1");
      out.push_back({Theta, p, sup, (p + 3.0) / (4.0 * N - 4.0) > sup + 1e-9});
    }
  }
  return out;
}

double theta_dagger(int N, const IntegratorConfig& cfg) {
  check_dimension(N);
  auto f = [&](double Theta) { return lambda1(N, Theta, cfg).lambda1 - 1.0; };
  double lo = 0.5, hi = kPi - 0.05;
  double flo = f(lo), fhi = f(hi);
  while (flo <= 0.0) {
    lo /= 2;
    flo = f(lo);
  }
  while (fhi >= 0.0) {
    hi = kPi - (kPi - hi) / 4;
    fhi = f(hi);
  }
  std::uintmax_t iters = 100;
  const auto [a, b] = boost::math::tools::toms748_solve(
      f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(50), iters);
  return 0.5 * (a + b);
}

double gamma_dagger_from(const std::function<double(double)>& phi, int N, double Theta) {
  check_dimension(N);
  check_cap(Theta);
  // phi^2 log(phi) -> 0 where phi vanishes; cells at or past the zero contribute 0.
  auto num = [&](double t) {
    const double v = phi(t);
    if (!(v > 1e-300)) return 0.0;
    return v * v * std::log(v) * std::pow(std::sin(t), N - 1.0);
  };
  auto den = [&](double t) {
    const double v = phi(t);
    return v * v * std::pow(std::sin(t), N - 1.0);
  };
  constexpr int kCells = 64;
  double a = 0.0, b = 0.0;
  for (int i = 0; i < kCells; ++i) {
    const double x0 = Theta * i / kCells, x1 = Theta * (i + 1) / kCells;
    a += GK21::integrate(num, x0, x1, 8, 1e-11);
    b += GK21::integrate(den, x0, x1, 8, 1e-11);
  }
  return std::exp(-a / b);
}

double gamma_dagger(int N, const IntegratorConfig& cfg) {
  check_dimension(N);
  // lambda = 1 puts the first zero of the eigenfunction at Theta_dagger.
  const RadialProfile phi = integrate_sphere_linear(N, 1.0, cfg);
  if (!phi.first_zero) throw NumericalFailure("eigenfunction for lambda = 1 has no zero");
  const double lo = phi.lower();
  auto f = [&](double t) { return t < lo ? 1.0 : phi.value_at(std::min(t, *phi.first_zero)); };
  return gamma_dagger_from(f, N, *phi.first_zero);
}

std::vector<std::pair<double, double>> gamma_p_trend(int N, double Theta,
                                                     const std::vector<double>& p_list,
                                                     const IntegratorConfig& cfg) {
  check_dimension(N);
  check_cap(Theta);
  std::vector<std::pair<double, double>> out;
  for (double p : p_list) {
    if (!(p > 1.0 && p < sobolev_exponent(N))) throw InvalidArgument("p must lie in (1, p_S)");
    out.emplace_back(p, gamma_of_theta(Params{N, p}, Theta, cfg));
  }
  return out;
}

}  // namespace efcap
