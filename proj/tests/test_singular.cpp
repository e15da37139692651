#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "efcap/branch.hpp"
#include "efcap/error.hpp"
#include "efcap/singular.hpp"

using namespace efcap;
using boost::multiprecision::cpp_bin_float_50;

namespace {
constexpr double kPi = std::numbers::pi;

IntegratorConfig tight() {
  IntegratorConfig c;
  c.rel_tol = 1e-12;
  c.abs_tol = 1e-14;
  return c;
}

const SingularProfile& n3p7() {
  static const SingularProfile s = compute_theta_star({3, 7.0}, IntegratorConfig{});
  return s;
}
}  // namespace

TEST_CASE("singular start values against a 50-digit evaluation") {
  const Params p{3, 7.0};
  const double th = 1e-3;
  const SingularStart st = singular_start_values(p, th);
  using F = cpp_bin_float_50;
  const F mu = F(2) / 6;
  const F a = pow(mu * (1 - mu), mu / 2);
  const F t = F(th);
  const F c = cos(t / 2), s = sin(t / 2), t2 = 2 * tan(t / 2);
  const F U0 = a * pow(c, -1) * pow(t2, -mu);
  const F dU0 = a * pow(c, -3) * pow(t2, -mu - 1) * (-mu + s * s);
  CHECK(st.U0 == doctest::Approx(U0.convert_to<double>()).epsilon(1e-12));
  CHECK(st.dU0 == doctest::Approx(dU0.convert_to<double>()).epsilon(1e-12));
}

TEST_CASE("singular start values approach the flat asymptote") {
  for (const Params& p : {Params{3, 7.0}, Params{5, 4.0}, Params{11, 8.0}}) {
    const Exponents e = compute_exponents(p);
    for (double th : {1e-4, 1e-6, 1e-8}) {
      const SingularStart st = singular_start_values(p, th);
      CHECK(st.U0 * std::pow(th, e.mu) / *e.a == doctest::Approx(1.0).epsilon(10 * th * th));
      CHECK(st.dU0 / st.U0 * th == doctest::Approx(-e.mu).epsilon(10 * th * th));
    }
  }
}

TEST_CASE("singular inputs are validated") {
  CHECK_THROWS_AS(singular_start_values({3, 5.0}, 1e-3), InvalidArgument);
  CHECK_THROWS_AS(singular_start_values({3, 3.0}, 1e-3), InvalidArgument);
  CHECK_THROWS_AS(singular_start_values({3, 7.0}, 0.0), InvalidArgument);
  CHECK_THROWS_AS(singular_start_values({3, 7.0}, 2e-2), InvalidArgument);
  CHECK_THROWS_AS(compute_theta_star({4, 3.0}, IntegratorConfig{}), InvalidArgument);
  SingularOptions bad;
  bad.halvings = 0;
  CHECK_THROWS_AS(compute_theta_star({3, 7.0}, IntegratorConfig{}, bad), InvalidArgument);
}

TEST_CASE("Theta* is well defined and stable under start halving") {
  const SingularProfile& s = n3p7();
  CHECK(s.Theta_star > 0.0);
  CHECK(s.Theta_star < kPi);
  CHECK(s.refinement_estimate < 1e-6);
  CHECK(s.R_star == doctest::Approx(std::tan(s.Theta_star / 2)).epsilon(1e-12));
  REQUIRE(s.raw_zeros.size() == 3);
  CHECK(s.theta_start == doctest::Approx(2.5e-5));
}

TEST_CASE("start bias shrinks by at least half per halving") {
  // Large offsets make the dropped corrections visible above the
  // integration noise.
  SingularOptions o;
  o.theta0 = 1e-2;
  o.halvings = 3;
  o.convergence_tol = 1e-2;
  const SingularProfile s = compute_theta_star({3, 7.0}, tight(), o);
  for (std::size_t i = 2; i < s.raw_zeros.size(); ++i) {
    const double d_prev = std::abs(s.raw_zeros[i - 1] - s.raw_zeros[i - 2]);
    const double d = std::abs(s.raw_zeros[i] - s.raw_zeros[i - 1]);
    CHECK(d <= 0.5 * d_prev);
  }
  CHECK(s.observed_order > 1.0);
  // The bias oscillates in sign (spiral modes of the Emden system), so the
  // extrapolation is only trusted to within the refinement estimate.
  const double ref = n3p7().Theta_star;
  CHECK(std::abs(s.Theta_star - ref) < s.refinement_estimate);
}

TEST_CASE("U* solves the sphere equation and decreases") {
  // Integrated form: sin^2 U' |_{t1}^{t2} = -int_{t1}^{t2} sin^2 U^7, checked on
  // log-spaced subintervals by Gauss-Kronrod quadrature of the dense output.
  const SingularProfile s = compute_theta_star({3, 7.0}, tight());
  const RadialProfile& u = s.profile;
  auto flux = [&](double t) { return std::pow(std::sin(t), 2) * u.derivative_at(t); };
  auto source = [&](double t) { return std::pow(std::sin(t), 2) * std::pow(u.value_at(t), 7); };
  const double lo = std::log(2 * s.theta_start), hi = std::log(s.Theta_star - 1e-6);
  double worst = 0.0;
  const int n = 200;
  for (int i = 0; i < n; ++i) {
    const double t1 = std::exp(lo + (hi - lo) * i / n), t2 = std::exp(lo + (hi - lo) * (i + 1) / n);
    const double q = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(source, t1, t2, 8);
    const double lhs = flux(t2) - flux(t1);
    const double scale = std::max({std::abs(flux(t1)), std::abs(flux(t2)), std::abs(q)});
    worst = std::max(worst, std::abs(lhs + q) / scale);
  }
  CHECK(worst < 1e-8);
  for (std::size_t i = 0; i < u.derivative.size(); ++i) CHECK(u.derivative[i] < 0.0);
  for (std::size_t i = 1; i < u.value.size(); ++i) CHECK(u.value[i] < u.value[i - 1]);
}

TEST_CASE("regular zeros approach Theta*") {
  const double th = theta_of_gamma({3, 7.0}, 1e6, IntegratorConfig{}).Theta;
  CHECK(std::abs(th - n3p7().Theta_star) < 1e-3);
}

TEST_CASE("Theta* for large p respects the lower bound") {
  const SingularProfile s = compute_theta_star({3, 50.0}, IntegratorConfig{});
  CHECK(s.Theta_star > kPi - std::asin(4.0 / 49.0));
  CHECK(s.Theta_star < kPi);
}

TEST_CASE("Emden variables of U* relax to the equilibrium at rate 2m") {
  const Params p{3, 7.0};
  const Exponents e = compute_exponents(p);
  const DecayFit f = asymptotic_decay_check(n3p7(), e);
  CHECK(f.rate == doctest::Approx(2 * *e.m).epsilon(0.15));

  SingularOptions o;
  o.theta0 = 1e-6;
  const SingularProfile fine = compute_theta_star(p, IntegratorConfig{}, o);
  CHECK(asymptotic_decay_check(fine, e).y_minus_one_at_start < 1e-3);
  CHECK_THROWS_AS(asymptotic_decay_check(n3p7(), e, 0.01, 0.0100001), InvalidArgument);
}

TEST_CASE("regular solutions converge to U*") {
  const SingularProfile& s = n3p7();
  std::vector<double> gl;
  for (int k = 1; k <= 5; ++k) gl.push_back(std::pow(10.0, k));
  const auto rows = convergence_study(s, gl, s.R_star / 2, IntegratorConfig{});
  REQUIRE(rows.size() == 5);
  for (std::size_t i = 1; i < rows.size(); ++i)
    CHECK(rows[i].sup_distance < rows[i - 1].sup_distance);
  CHECK(rows.back().zero_gap < 1e-2);
  CHECK(rows.back().zero_gap < rows.front().zero_gap);
}

TEST_CASE("regular solutions lie below U* before their first intersection") {
  // u(., gamma) ~ gamma on r << gamma^(-(p-1)/2) while u* blows up there.
  SingularOptions o;
  o.theta0 = 1e-9;
  const SingularProfile s = compute_theta_star({3, 7.0}, IntegratorConfig{}, o);
  for (double g : {1.0, 10.0, 100.0}) {
    const double r0 = 1e-2 * std::pow(g, -3.0);
    const auto rows = convergence_study(s, {g}, r0, IntegratorConfig{}, 50);
    CHECK(rows[0].below_singular_at_r0);
  }
  CHECK_THROWS_AS(convergence_study(s, {10.0, 1.0}, 0.1, IntegratorConfig{}), InvalidArgument);
  CHECK_THROWS_AS(convergence_study(s, {10.0}, s.R_star * 2, IntegratorConfig{}), InvalidArgument);
}
