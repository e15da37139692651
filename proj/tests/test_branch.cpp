#include <doctest.h>

#include <cmath>
#include <numbers>

#include "efcap/branch.hpp"
#include "efcap/error.hpp"

using namespace efcap;

namespace {
constexpr double kPi = std::numbers::pi;

IntegratorConfig tight() {
  IntegratorConfig c;
  c.rel_tol = 1e-12;
  c.abs_tol = 1e-14;
  return c;
}

// dTheta/dGamma = -W(Theta) / U'(Theta) from the variational shoot.
double variational_slope(const Params& p, double G, const IntegratorConfig& cfg) {
  const auto sv = shoot_sphere_variational({p.N, p.p, 1.0}, G, cfg);
  return -sv.W_at_zero / sv.U.end_derivative;
}
}  // namespace

TEST_CASE("critical shoots agree with the unsplit integration where both are accurate") {
  // Above c Gamma^(p-1) = 1 regular critical shoots integrate the deviation
  // from the conformal bubble. shoot_sphere never splits, so it is an
  // independent reference at moderate Gamma.
  const IntegratorConfig cfg = tight();
  for (int N : {3, 4, 6}) {
    const double pS = (N + 2.0) / (N - 2.0);
    const SphereProblem prob{N, pS, 1.0};
    for (double G : {1.5, 3.0}) {
      const double th0 = 1e-7 / std::pow(G, (pS - 1.0) / 2.0);
      const double f0 = std::pow(G, pS);
      const auto ref = shoot_sphere(prob, th0, G - f0 * th0 * th0 / (2.0 * N), -f0 * th0 / N, cfg);
      const auto split = shoot_sphere_regular(prob, G, cfg);
      CAPTURE(N);
      CAPTURE(G);
      CHECK(*split.first_zero == doctest::Approx(*ref.first_zero).epsilon(1e-9));
      // Nodes carry the physical solution: U = Gamma at the start, U' < 0.
      CHECK(split.value.front() == doctest::Approx(G).epsilon(1e-10));
      CHECK(split.derivative.front() < 0.0);

      const auto sv = shoot_sphere_variational(prob, G, cfg);
      const double h = 1e-5 * G;
      const double fd = (*shoot_sphere_regular(prob, G + h, cfg).first_zero -
                         *shoot_sphere_regular(prob, G - h, cfg).first_zero) /
                        (2 * h);
      CHECK(-sv.W_at_zero / sv.U.end_derivative == doctest::Approx(fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("critical zeros converge at large Gamma") {
  const Params p{3, 5.0};
  IntegratorConfig fine = tight();
  fine.rel_tol = 1e-13;
  fine.abs_tol = 1e-15;
  for (double G : {1e4, 1e5}) {
    const double a = theta_of_gamma(p, G, {}).Theta - kPi / 2;
    const double b = theta_of_gamma(p, G, fine).Theta - kPi / 2;
    CAPTURE(G);
    CHECK(a > 0.0);
    CHECK(b > 0.0);
    CHECK(std::abs(a - b) < 0.1 * b);
  }
}

TEST_CASE("theta_of_gamma fields are consistent") {
  const Params p{3, 7.0};
  const IntegratorConfig cfg;
  for (double G : {0.01, 1.0, 50.0, 1e4}) {
    const BranchPoint bp = theta_of_gamma(p, G, cfg);
    const auto prof = integrate_sphere_regular(p, G, cfg);
    CHECK(bp.Gamma == G);
    CHECK(bp.gamma == doctest::Approx(std::sqrt(2.0) * G).epsilon(1e-15));
    CHECK(bp.Theta == doctest::Approx(*prof.first_zero).epsilon(1e-12));
    CHECK(bp.Theta + bp.Theta_complement == doctest::Approx(kPi).epsilon(1e-15));
    CHECK(bp.R == doctest::Approx(1.0 / std::tan(bp.Theta_complement / 2)).epsilon(1e-12));
    CHECK(bp.theta_error > 0.0);
  }
}

TEST_CASE("slope sign matches a finite-difference slope") {
  const IntegratorConfig cfg = tight();
  for (const Params& p : {Params{3, 7.0}, Params{3, 5.0}, Params{4, 2.5}}) {
    for (double G : {0.3, 2.0, 8.0, 35.0, 150.0}) {
      const BranchPoint bp = theta_of_gamma(p, G, cfg);
      const SlopeEstimate fd = finite_difference_slope(p, G, 1e-4, cfg);
      CAPTURE(p.p);
      CAPTURE(G);
      REQUIRE(std::abs(fd.slope) > 10.0 * fd.error);
      CHECK(bp.slope_sign == (fd.slope > 0 ? 1 : -1));
      CHECK(variational_slope(p, G, cfg) ==
            doctest::Approx(fd.slope).epsilon(1e-4 + fd.error / std::abs(fd.slope)));
    }
  }
}

TEST_CASE("critical branch: decreasing, above the equator and near it at large Gamma") {
  const Params p{3, 5.0};
  const IntegratorConfig cfg;
  const double lo = std::log(1e-3), hi = std::log(1e4);
  double prev = kPi;
  for (int i = 0; i < 60; ++i) {
    const double G = std::exp(lo + (hi - lo) * i / 59.0);
    const BranchPoint bp = theta_of_gamma(p, G, cfg);
    CAPTURE(G);
    CHECK(bp.Theta < prev);
    CHECK(bp.Theta > kPi / 2);
    CHECK(bp.slope_sign == -1);
    prev = bp.Theta;
  }
  CHECK(prev < kPi / 2 + 0.05);
}

TEST_CASE("subcritical slopes are negative") {
  const IntegratorConfig cfg;
  for (const Params& p : {Params{3, 3.0}, Params{5, 1.5}}) {
    const Branch br = trace_branch(p, 1e-2, 1e3, 30, cfg);
    CHECK(br.turning_points.empty());
    for (const auto& bp : br.points) CHECK(bp.slope_sign == -1);
  }
}

TEST_CASE("supercritical branch has turning points") {
  const Params p{3, 7.0};
  const IntegratorConfig cfg;
  const Branch br = trace_branch(p, 1e-2, 1e5, 80, cfg);
  CHECK(br.failures.empty());
  REQUIRE(br.turning_points.size() >= 1);
  CHECK(br.theta_min < kPi - 0.2);
  for (std::size_t i = 1; i < br.points.size(); ++i)
    CHECK(br.points[i].Gamma > br.points[i - 1].Gamma);

  for (const auto& tp : br.turning_points) {
    CHECK(std::log(tp.Gamma_high / tp.Gamma_low) <= 1e-4 * (1 + 1e-9));
    const int s_lo = theta_of_gamma(p, tp.Gamma_low, cfg).slope_sign;
    const int s_hi = theta_of_gamma(p, tp.Gamma_high, cfg).slope_sign;
    CHECK(s_lo * s_hi == -1);
    // Independent of the variational sign: Theta changes direction across the bracket.
    const double d = 2e-2;
    const double t0 = theta_of_gamma(p, tp.Gamma_low * std::exp(-d), cfg).Theta;
    const double t1 = theta_of_gamma(p, tp.Gamma_low, cfg).Theta;
    const double t2 = theta_of_gamma(p, tp.Gamma_high * std::exp(d), cfg).Theta;
    CHECK((t1 - t0) * (t2 - t1) < 0.0);
  }
  // The smallest Theta sits next to the first turning point.
  const auto e = underline_theta_estimate(br);
  CHECK(e.theta_min == br.theta_min);
  CHECK(e.Gamma_low <= e.Gamma);
  CHECK(e.Gamma <= e.Gamma_high);
  CHECK(br.single_valued_above >= br.theta_min);
  CHECK(br.single_valued_above < kPi);
}

TEST_CASE("branch tracing is independent of the thread count") {
  const Params p{3, 7.0};
  const IntegratorConfig cfg;
  BranchOptions one;
  one.threads = 1;
  BranchOptions many;
  many.threads = 4;
  const Branch a = trace_branch(p, 0.5, 50.0, 20, cfg, one);
  const Branch b = trace_branch(p, 0.5, 50.0, 20, cfg, many);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) CHECK(a.points[i].Theta == b.points[i].Theta);
  REQUIRE(a.turning_points.size() == b.turning_points.size());
  // Re-evaluation from scratch reproduces a stored point.
  const auto& mid = a.points[a.points.size() / 2];
  const BranchPoint again = theta_of_gamma(p, mid.Gamma, cfg);
  CHECK(std::abs(again.Theta - mid.Theta) <= 10.0 * mid.theta_error);
}

TEST_CASE("oscillation counting") {
  CHECK(oscillation_count(std::vector<double>{1.0, 2.0, 1.0, 2.0}, 1.5) == 3);
  CHECK(oscillation_count(std::vector<double>{1.0, 1.5, 2.0}, 1.5) == 1);
  // Points inside the dead band neither count nor reset the sign.
  CHECK(oscillation_count(std::vector<double>{1.0, 1.5 + 1e-12, 1.0}, 1.5) == 0);
  CHECK(oscillation_count(std::vector<double>{}, 1.5) == 0);
  CHECK(oscillation_count(std::vector<double>{2.0, 3.0}, 1.5) == 0);
}

TEST_CASE("gamma_of_theta inverts the branch") {
  const IntegratorConfig cfg;
  for (const Params& p : {Params{3, 5.0}, Params{3, 3.0}, Params{4, 2.0}}) {
    for (double Th : {1.7, 2.0, 2.8, 3.1}) {
      CAPTURE(p.p);
      CAPTURE(Th);
      const double G = gamma_of_theta(p, Th, cfg);
      CHECK(theta_of_gamma(p, G, cfg).Theta == doctest::Approx(Th).epsilon(1e-8));
      // Bracketing by neighbours confirms the relative accuracy.
      CHECK(theta_of_gamma(p, G * (1 - 1e-6), cfg).Theta > Th);
      CHECK(theta_of_gamma(p, G * (1 + 1e-6), cfg).Theta < Th);
    }
  }
}

TEST_CASE("gamma_of_theta with a coefficient scales like c^(-1/(p-1))") {
  const IntegratorConfig cfg;
  const double G1 = gamma_of_theta(SphereProblem{3, 3.0, 1.0}, 2.0, cfg);
  const double G4 = gamma_of_theta(SphereProblem{3, 3.0, 4.0}, 2.0, cfg);
  CHECK(G4 == doctest::Approx(G1 / 2.0).epsilon(1e-8));
}

TEST_CASE("branch errors") {
  const IntegratorConfig cfg;
  CHECK_THROWS_AS(gamma_of_theta(Params{3, 5.0}, kPi / 2, cfg), OutOfRange);
  CHECK_THROWS_AS(gamma_of_theta(Params{3, 5.0}, 1.0, cfg), OutOfRange);
  CHECK_THROWS_AS(gamma_of_theta(Params{3, 7.0}, 2.0, cfg), InvalidArgument);
  CHECK_THROWS_AS(gamma_of_theta(Params{3, 3.0}, 0.0, cfg), InvalidArgument);
  CHECK_THROWS_AS(gamma_of_theta(Params{3, 3.0}, kPi, cfg), InvalidArgument);
  CHECK_THROWS_AS(theta_of_gamma(Params{3, 7.0}, -1.0, cfg), InvalidArgument);
  CHECK_THROWS_AS(theta_of_gamma(Params{3, 7.0}, std::nan(""), cfg), InvalidArgument);
  CHECK_THROWS_AS(trace_branch(Params{3, 7.0}, 10.0, 1.0, 10, cfg), InvalidArgument);
  CHECK_THROWS_AS(trace_branch(Params{3, 7.0}, 1.0, 10.0, 1, cfg), InvalidArgument);
  CHECK_THROWS_AS(underline_theta_estimate(Branch{}), InvalidArgument);
}
