#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "efcap/branch.hpp"
#include "efcap/error.hpp"
#include "efcap/singular.hpp"
#include "efcap/spectral.hpp"

using namespace efcap;

namespace {
constexpr double kPi = std::numbers::pi;
using GK = boost::math::quadrature::gauss_kronrod<double, 31>;

// Smallest eigenvalue of (sin^(N-1) phi')' + lambda sin^(N-1) phi = 0 on
// (0, Theta), phi'(0) = 0, phi(Theta) = 0, by a vertex-centred finite-volume
// discretization with n cells and Sturm-sequence bisection.
double fv_lambda1(int N, double Theta, int n) {
  const double h = Theta / n;
  auto w = [&](double t) { return std::pow(std::sin(t), N - 1.0); };
  std::vector<double> d(n), e(n, 0.0), m(n);
  for (int i = 0; i < n; ++i) {
    const double lo = std::max(0.0, (i - 0.5) * h), hi = (i + 0.5) * h;
    m[i] = GK::integrate(w, lo, hi, 0);
    const double wl = i > 0 ? w((i - 0.5) * h) : 0.0, wr = w((i + 0.5) * h);
    d[i] = (wl + wr) / h;
    if (i + 1 < n) e[i] = -wr / h;
  }
  for (int i = 0; i < n; ++i) {
    d[i] /= m[i];
    if (i + 1 < n) e[i] /= std::sqrt(m[i] * m[i + 1]);
  }
  auto count_below = [&](double x) {
    int c = 0;
    double piv = 1.0;
    for (int i = 0; i < n; ++i) {
      piv = d[i] - x - (i > 0 ? e[i - 1] * e[i - 1] / piv : 0.0);
      if (piv < 0) ++c;
      if (piv == 0) piv = 1e-300;
    }
    return c;
  };
  double a = 0.0, b = 100.0 * N;
  for (int it = 0; it < 200; ++it) {
    const double c = 0.5 * (a + b);
    (count_below(c) >= 1 ? b : a) = c;
  }
  return 0.5 * (a + b);
}

// Closed-form sin^(N-2)(theta) int_theta^Theta sin^(1-N) for N = 3, 4, 5.
double closed_scaled_integral(int N, double th, double Th) {
  auto G = [N](double t) {
    const double c = std::cos(t), s = std::sin(t);
    if (N == 3) return -c / s;
    if (N == 4) return -c / (2 * s * s) + 0.5 * std::log(std::tan(t / 2));
    return -c / s - std::pow(c / s, 3) / 3;
  };
  return std::pow(std::sin(th), N - 2.0) * (G(Th) - G(th));
}

IntegratorConfig tight() {
  IntegratorConfig c;
  c.rel_tol = 1e-12;
  c.abs_tol = 1e-14;
  return c;
}
}  // namespace

TEST_CASE("lambda1 on N = 3 caps matches (pi/Theta)^2 - 1") {
  const IntegratorConfig cfg;
  for (double Th : {0.5, 1.0, kPi / 2, 2.0, 3.0, 3 * kPi / 4}) {
    CAPTURE(Th);
    const EigenResult e = lambda1(3, Th, cfg);
    CHECK(std::abs(e.lambda1 - (std::pow(kPi / Th, 2) - 1)) < 1e-8);
    CHECK(std::abs(*e.phi_profile.first_zero - Th) < 1e-10);
    CHECK(e.bracket.first <= e.lambda1);
    CHECK(e.lambda1 <= e.bracket.second);
  }
  CHECK(lambda1(3, 3 * kPi / 4, cfg).lambda1 == doctest::Approx(7.0 / 9.0).epsilon(1e-10));
}

TEST_CASE("hemisphere eigenvalue is N") {
  // phi = cos(theta) is the first eigenfunction of the hemisphere.
  for (int N : {3, 4, 5, 8}) CHECK(lambda1(N, kPi / 2, IntegratorConfig{}).lambda1 ==
                                   doctest::Approx(N).epsilon(1e-9));
}

TEST_CASE("lambda1 for N = 4 against a finite-volume solve") {
  const double a = fv_lambda1(4, kPi / 2, 2000), b = fv_lambda1(4, kPi / 2, 4000);
  const double c = fv_lambda1(4, kPi / 2, 8000);
  const double rich1 = (4 * b - a) / 3, rich2 = (4 * c - b) / 3;
  CHECK(std::abs(rich2 - rich1) < 1e-8);
  CHECK(rich2 == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(lambda1(4, kPi / 2, IntegratorConfig{}).lambda1 == doctest::Approx(rich2).epsilon(1e-9));
  const double a1 = fv_lambda1(4, 2.2, 4000), b1 = fv_lambda1(4, 2.2, 8000);
  CHECK(lambda1(4, 2.2, IntegratorConfig{}).lambda1 ==
        doctest::Approx((4 * b1 - a1) / 3).epsilon(1e-8));
}

TEST_CASE("lambda1 decreases strictly in Theta") {
  for (int N : {3, 4, 6}) {
    double prev = INFINITY;
    for (double Th = 0.1; Th < 3.1; Th += 0.15) {
      const double l = lambda1(N, Th, IntegratorConfig{}).lambda1;
      CHECK(l < prev);
      prev = l;
    }
    CHECK(lambda1(N, 0.1, IntegratorConfig{}).lambda1 >
          100 * lambda1(N, 3.0, IntegratorConfig{}).lambda1);
  }
  CHECK_THROWS_AS(lambda1(3, kPi - 1e-9, IntegratorConfig{}), NumericalFailure);
  CHECK_THROWS_AS(lambda1(3, 1e-9, IntegratorConfig{}), NumericalFailure);
  CHECK_THROWS_AS(lambda1(3, kPi, IntegratorConfig{}), InvalidArgument);
  CHECK_THROWS_AS(lambda1(2, 1.0, IntegratorConfig{}), InvalidArgument);
}

TEST_CASE("Bessel limit of the rescaled first zero") {
  CHECK(bessel_zero(3) == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(bessel_zero(4) == doctest::Approx(3.8317059702075123).epsilon(1e-14));
  for (int N : {3, 4, 7}) {
    const auto s = bessel_limit_check(N, {1e2, 1e3, 1e4}, IntegratorConfig{});
    const double j = bessel_zero(N);
    CHECK(std::abs(s[1].product - j) < std::abs(s[0].product - j));
    CHECK(std::abs(s[2].product - j) < std::abs(s[1].product - j));
    CHECK(std::abs(s[2].product - j) < 0.05);
  }
}

TEST_CASE("Rayleigh identity for the quadratic form at u") {
  for (const Params& p : {Params{3, 7.0}, Params{3, 3.0}, Params{4, 2.5}, Params{5, 2.0}}) {
    for (double G : {0.5, 3.0, 40.0}) {
      CAPTURE(p.N);
      CAPTURE(p.p);
      CAPTURE(G);
      const VariationalResult v = integrate_variational(p, G, IntegratorConfig{});
      const RayleighCheck r = rayleigh_check(p, v.u_profile);
      CHECK(r.H_of_u < 0.0);
      CHECK(r.integral_form < 0.0);
      CHECK(r.relative_difference < 1e-6);
      const RayleighCheck r2 = rayleigh_check(p, v.u_profile, 2);
      CHECK(std::abs(r2.H_of_u - r.H_of_u) < 1e-8 * std::abs(r.H_of_u));
      CHECK(std::abs(r2.integral_form - r.integral_form) < 1e-8 * std::abs(r.integral_form));
    }
  }
  const RadialProfile theta_frame = integrate_sphere_regular({3, 7.0}, 1.0, IntegratorConfig{});
  CHECK_THROWS_AS(rayleigh_check({3, 7.0}, theta_frame), InvalidArgument);
}

TEST_CASE("psi0 solves the second-eigenfunction equation") {
  std::vector<double> g;
  for (int i = 0; i <= 500; ++i) g.push_back(0.1 * std::pow(100.0, i / 500.0));
  for (int N : {3, 4, 10}) {
    CHECK(psi0_residual(N, g) < 1e-9);
    // Independent check by Richardson-extrapolated central differences.
    for (double r : {0.2, 0.9, 3.0}) {
      auto fd = [&](double h) {
        const double d1 = (psi0(N, r + h) - psi0(N, r - h)) / (2 * h);
        const double d2 = (psi0(N, r + h) - 2 * psi0(N, r) + psi0(N, r - h)) / (h * h);
        const double A = conformal_factor(r);
        return d2 + (N - 1) / r * d1 + (N * (N - 2) / 4.0 + N) * A * A * psi0(N, r);
      };
      CHECK(std::abs((4 * fd(5e-4) - fd(1e-3)) / 3) < 1e-6);
    }
    CHECK(psi0(N, 1.0) == 0.0);
    CHECK(psi0(N, 0.0) == doctest::Approx(std::pow(2.0, (N - 2) / 2.0)));
    for (double r : g) CHECK((r < 1.0 ? psi0(N, r) > 0 : r > 1.0 ? psi0(N, r) < 0 : true));
  }
  CHECK_THROWS_AS(psi0_residual(3, {0.0}), InvalidArgument);
}

TEST_CASE("inverse sine integral against antiderivatives") {
  for (int N : {3, 4, 5})
    for (double Th : {1.0, 2.0, 3.1})
      for (double th : {1e-8, 1e-3, 0.3, 0.99, 1.9, 3.0}) {
        if (th > Th) continue;
        CAPTURE(N);
        CAPTURE(th);
        CAPTURE(Th);
        const double ref = closed_scaled_integral(N, th, Th);
        CHECK(scaled_inverse_sine_integral(N, th, Th) ==
              doctest::Approx(ref).epsilon(1e-11).scale(1e-14));
      }
  CHECK(scaled_inverse_sine_integral(3, 1.0, 1.0) == 0.0);
  CHECK_THROWS_AS(scaled_inverse_sine_integral(3, 1.5, 1.0), InvalidArgument);
}

TEST_CASE("F for N = 3 and its limit at 0") {
  for (double Th : {0.8, 2.0, 2.9})
    for (int i = 1; i <= 40; ++i) {
      const double th = Th * i / 40.0;
      CHECK(std::abs(pohozaev_F(3, th, Th) - (0.5 - std::sin(2 * th - Th) / (2 * std::sin(Th)))) <
            1e-10);
    }
  for (int N : {3, 4, 7}) CHECK(pohozaev_F(N, 1e-7, 2.0) == doctest::Approx(1.0 / (N - 2)).epsilon(1e-6));
  // sup F = 1/2 + 1/(2 sin Theta) once the interior maximum exists, else F(0+) = 1.
  for (double Th : {0.7, 1.2, 1.8, 2.5, 3.0}) {
    const double ref = Th >= kPi / 2 ? 0.5 + 0.5 / std::sin(Th) : 1.0;
    CHECK(pohozaev_F_sup(3, Th).value == doctest::Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("nonexistence certificate") {
  CHECK(nonexistence_certificate(3, 10.0, 2.0));
  CHECK_FALSE(nonexistence_certificate(3, 10.0, 3.1));
  CHECK_FALSE(nonexistence_certificate(3, 10.0, kPi - 1e-6));
  // For N = 3 the certificate holds exactly below pi - arcsin(4/(p-1)).
  for (double p : {10.0, 20.0, 50.0}) {
    const double edge = kPi - std::asin(4.0 / (p - 1.0));
    CHECK(nonexistence_certificate(3, p, edge - 1e-4));
    CHECK_FALSE(nonexistence_certificate(3, p, edge + 1e-4));
  }
  // Monotone in p: the left side grows, F does not depend on p.
  for (double Th : {1.0, 2.0, 2.8}) {
    bool seen = false;
    for (double p = 2.0; p < 60; p += 2.0) {
      const bool c = nonexistence_certificate(4, p, Th);
      CHECK(!(seen && !c));
      seen = seen || c;
    }
    CHECK(seen);
  }
  const auto region = nonexistence_region(3, {2.0, 3.1}, {10.0});
  REQUIRE(region.size() == 2);
  CHECK(region[0].certified);
  CHECK_FALSE(region[1].certified);
  CHECK_THROWS_AS(nonexistence_certificate(3, 1.0, 2.0), InvalidArgument);
}

TEST_CASE("certified caps carry no branch point") {
  const Params p{3, 10.0};
  const double edge = kPi - std::asin(4.0 / 9.0);
  const Branch b = trace_branch(p, 1e-2, 1e4, 60, IntegratorConfig{});
  CHECK(b.theta_min >= edge - 1e-6);
  CHECK(nonexistence_certificate(3, 10.0, edge - 1e-6));
}

TEST_CASE("Pohozaev endpoints vanish on computed solutions") {
  const IntegratorConfig cfg;
  for (const Params& p : {Params{3, 3.0}, Params{3, 5.0}, Params{3, 7.0}, Params{4, 2.5},
                          Params{6, 3.0}}) {
    for (double G : {0.3, 5.0, 300.0}) {
      CAPTURE(p.N);
      CAPTURE(p.p);
      CAPTURE(G);
      const PohozaevTrace t = pohozaev_trace(p, integrate_sphere_regular(p, G, cfg));
      CHECK(t.scale > 0.0);
      CHECK(std::abs(t.H_end) < 1e-8 * t.scale);
      CHECK(std::abs(t.H_start) < 1e-8 * t.scale);
    }
  }
  // U* blows up at 0; H decays like theta^(N-2-2mu), so the start must be tiny.
  SingularOptions o;
  o.theta0 = 1e-30;
  const SingularProfile s = compute_theta_star({3, 7.0}, cfg, o);
  const PohozaevTrace t = pohozaev_trace({3, 7.0}, s.profile);
  CHECK(std::abs(t.H_end) < 1e-8 * t.scale);
  CHECK(std::abs(t.H_start) < 1e-8 * t.scale);
}

TEST_CASE("H' = (4N-4)/(p+1) U^(p+1) sin^(N-1) ((p+3)/(4N-4) - F)") {
  const Params p{4, 2.5};
  const RadialProfile u = integrate_sphere_regular(p, 3.0, tight());
  const double Th = *u.first_zero;
  auto dH = [&](double t) {
    const double U = u.value_at(t);
    return (4.0 * p.N - 4) / (p.p + 1) * std::pow(U, p.p + 1) * std::pow(std::sin(t), p.N - 1) *
           ((p.p + 3) / (4.0 * p.N - 4) - pohozaev_F(p.N, t, Th));
  };
  for (double a = 0.05; a + 0.2 < Th; a += 0.2) {
    const double lhs = pohozaev_H(p, u, a + 0.2) - pohozaev_H(p, u, a);
    const double rhs = GK::integrate(dH, a, a + 0.2, 6, 1e-12);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-7).scale(1e-12));
  }
}

TEST_CASE("Theta dagger and Gamma dagger") {
  const IntegratorConfig cfg;
  const double td = theta_dagger(3, cfg);
  CHECK(std::abs(td - kPi / std::sqrt(2.0)) < 1e-8);
  CHECK(std::abs(lambda1(3, td, cfg).lambda1 - 1.0) < 1e-9);
  const double td4 = theta_dagger(4, cfg);
  CHECK(td4 == doctest::Approx(*integrate_sphere_linear(4, 1.0, cfg).first_zero).epsilon(1e-9));
  CHECK(std::abs(theta_dagger(4, cfg.tightened(2)) - td4) < 1e-8);

  const double gd = gamma_dagger(3, cfg);
  CHECK(gd > 0.0);
  CHECK(std::isfinite(gd));
  const double T = kPi / std::sqrt(2.0);
  const double closed = gamma_dagger_from(
      [&](double t) { return t == 0.0 ? 1.0 : T * std::sin(kPi * t / T) / (kPi * std::sin(t)); },
      3, T);
  CHECK(std::abs(gd - closed) < 1e-6 * closed);
  CHECK(std::abs(gamma_dagger(4, cfg) - gamma_dagger(4, cfg.tightened(4))) < 1e-7);
}

TEST_CASE("Gamma(p) trends as p decreases to 1") {
  const IntegratorConfig cfg;
  const std::vector<double> ps{1.5, 1.2, 1.1, 1.05};
  const auto lo = gamma_p_trend(3, 1.8, ps, cfg);
  const auto hi = gamma_p_trend(3, 2.6, ps, cfg);
  for (std::size_t i = 1; i < ps.size(); ++i) {
    CHECK(lo[i].second > lo[i - 1].second);
    CHECK(hi[i].second < hi[i - 1].second);
  }
  const double gd = gamma_dagger(3, cfg);
  const auto mid = gamma_p_trend(3, kPi / std::sqrt(2.0), {1.05}, cfg);
  CHECK(std::abs(mid[0].second - gd) < 0.2 * gd);

  // Gamma(p) = lambda1^(1/(p-1)) Gamma1(p), Gamma1 from the problem with coefficient lambda1.
  for (double Th : {1.8, 2.6})
    for (double p : {1.5, 1.2}) {
      const double l = lambda1(3, Th, cfg).lambda1;
      const double G1 = gamma_of_theta(SphereProblem{3, p, l}, Th, cfg);
      const double G = gamma_p_trend(3, Th, {p}, cfg)[0].second;
      CHECK(G == doctest::Approx(std::pow(l, 1 / (p - 1)) * G1).epsilon(1e-6));
    }
  CHECK_THROWS_AS(gamma_p_trend(3, 1.8, {5.0}, cfg), InvalidArgument);
}
