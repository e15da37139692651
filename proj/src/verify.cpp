#include "efcap/verify.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>

#include <fmt/format.h>

#include "efcap/branch.hpp"
#include "efcap/error.hpp"
#include "efcap/model.hpp"
#include "efcap/phase.hpp"
#include "efcap/singular.hpp"
#include "efcap/spectral.hpp"

namespace efcap {

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string measured;
  std::string tolerance;
};

std::string g6(double x) { return fmt::format("{:.6g}", x); }

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo * std::pow(hi / lo, i / (n - 1.0));
  return g;
}

Outcome eigen_closed_form(const IntegratorConfig& cfg) {
  double worst = 0.0;
  for (double Th : {0.5, 1.0, kPi / 2, 2.0, 3.0})
    worst = std::max(worst, std::abs(lambda1(3, Th, cfg).lambda1 - (std::pow(kPi / Th, 2) - 1)));
  return {worst < 1e-8, "max |dlambda| = " + g6(worst), "< 1e-8"};
}

Outcome exponent_identities(const IntegratorConfig&) {
  double worst = 0.0;
  for (int N = 3; N <= 12; ++N) {
    const double pS = sobolev_exponent(N);
    for (int i = 1; i <= 50; ++i) {
      const Exponents e = compute_exponents({N, pS + 10.0 * i / 50});
      worst = std::max(worst, std::abs(*e.m * *e.m * e.mu * (N - 2 - e.mu) - 1.0));
    }
  }
  const double jl = std::abs(joseph_lundgren_exponent(11) - (1 + 4 / (7 - 2 * std::sqrt(10.0))));
  return {worst < 1e-14 && jl < 1e-12,
          "max rel dev = " + g6(worst) + ", |p_JL(11) err| = " + g6(jl), "< 1e-14, < 1e-12"};
}

Outcome flat_singular_check(const IntegratorConfig&) {
  double worst = 0.0;
  for (const Params& p : {Params{3, 7.0}, Params{5, 4.0}, Params{11, 8.0}})
    for (double r : log_grid(0.1, 10.0, 201)) worst = std::max(worst, flat_singular_residual(p, r));
  return {worst < 1e-10, "max rel residual = " + g6(worst), "< 1e-10"};
}

Outcome psi0_identity(const IntegratorConfig&) {
  double worst = 0.0;
  const auto g = log_grid(0.1, 10.0, 1001);
  for (int N : {3, 4, 10}) worst = std::max(worst, psi0_residual(N, g));
  return {worst < 1e-9, "max residual = " + g6(worst), "< 1e-9"};
}

Outcome critical_limits(const IntegratorConfig& cfg) {
  const Params p{3, 5.0};
  bool decreasing = true, above = true;
  double prev = kPi, min_gap = INFINITY;
  for (double G : log_grid(1e-3, 1e4, 60)) {
    const double th = theta_of_gamma(p, G, cfg).Theta;
    decreasing = decreasing && th < prev;
    above = above && th > kPi / 2;
    min_gap = std::min(min_gap, th - kPi / 2);
    prev = th;
  }
  const bool near = prev > kPi / 2 && prev < kPi / 2 + 0.05;
  return {decreasing && above && near,
          fmt::format("decreasing={} Theta(1e4)-pi/2={} min(Theta-pi/2)={}", decreasing,
                      g6(prev - kPi / 2), g6(min_gap)),
          "strictly decreasing, Theta(1e4)-pi/2 in (0, 0.05), all > pi/2"};
}

Outcome supercritical_oscillation(const IntegratorConfig& cfg) {
  const Params p{3, 7.0};
  const SingularProfile s = compute_theta_star(p, cfg);
  const Branch b = trace_branch(p, 1e-2, 1e6, 161, cfg);
  const int osc = oscillation_count(b, s.Theta_star);
  const bool ok = s.refinement_estimate < 1e-6 && osc >= 2 && !b.turning_points.empty() &&
                  b.failures.empty();
  return {ok,
          fmt::format("Theta*={} refinement={} oscillations={} turning brackets={}",
                      g6(s.Theta_star), g6(s.refinement_estimate), osc, b.turning_points.size()),
          "refinement < 1e-6, oscillations >= 2, brackets >= 1"};
}

Outcome lyapunov_suite(const IntegratorConfig& cfg) {
  const Params p{3, 7.0};
  const PhaseOrbit o = flat_orbit(p, 1.0, {flat_orbit_start_time(p, 1.0), 60.0}, cfg);
  double inc = -INFINITY;
  for (std::size_t i = 1; i < o.J_trace.size(); ++i)
    inc = std::max(inc, o.J_trace[i] - o.J_trace[i - 1]);
  const double dist = std::hypot(o.y.back() - 1.0, o.z.back());
  const Exponents e = compute_exponents(p);
  const EquilibriumReport eq = equilibrium_report(e, p.p);
  const bool spiral_ok = eq.spiral && classify(p).spiral && *e.alpha * *e.alpha < 4 * (p.p - 1);
  return {inc < 1e-10 && dist < 1e-4 && spiral_ok,
          fmt::format("max dJ step = {} endpoint distance = {} spiral = {}", g6(inc), g6(dist),
                      spiral_ok),
          "< 1e-10, < 1e-4, spiral"};
}

Outcome intersection_growth(const IntegratorConfig& cfg) {
  const Params p{3, 7.0};
  std::vector<int> flat;
  int indeterminate = 0;
  for (double rm : {10.0, 100.0, 1000.0}) {
    const IntersectionResult r = flat_intersections(p, 1.0, 0.01, rm, cfg);
    flat.push_back(r.count);
    indeterminate += r.indeterminate;
  }
  const IntersectionResult c10 = cap_intersections(p, 10.0, cfg);
  const IntersectionResult c4 = cap_intersections(p, 1e4, cfg);
  indeterminate += c10.indeterminate + c4.indeterminate;
  const bool ok = flat[0] <= flat[1] && flat[1] <= flat[2] && flat[2] >= 3 &&
                  c4.count > c10.count && indeterminate == 0;
  return {ok,
          fmt::format("flat {}/{}/{} cap(10)={} cap(1e4)={} uncertified={}", flat[0], flat[1],
                      flat[2], c10.count, c4.count, indeterminate),
          "flat nondecreasing and >= 3 at 1e3, cap(1e4) > cap(10)"};
}

Outcome pohozaev_endpoints(const IntegratorConfig& cfg) {
  double worst = 0.0;
  int profiles = 0;
  auto add = [&](const Params& p, const RadialProfile& prof) {
    const PohozaevTrace t = pohozaev_trace(p, prof);
    worst = std::max({worst, std::abs(t.H_end) / t.scale, std::abs(t.H_start) / t.scale});
    ++profiles;
  };
  const std::vector<std::pair<Params, std::vector<double>>> cases{
      {{3, 3.0}, {0.1, 10.0}},       {{3, 5.0}, {0.1, 10.0, 1e3}}, {{3, 7.0}, {0.5, 50.0, 1e4}},
      {{3, 10.0}, {1.0, 100.0}},     {{4, 2.5}, {1.0, 100.0}},     {{6, 3.0}, {0.5, 20.0}}};
  for (const auto& [p, gammas] : cases)
    for (double G : gammas) add(p, integrate_sphere_regular(p, G, cfg));
  // U* needs a tiny start: H decays only like theta^(N-2-2mu) there.
  SingularOptions so;
  so.theta0 = 1e-30;
  add({3, 7.0}, compute_theta_star({3, 7.0}, cfg, so).profile);
  return {worst < 1e-8, fmt::format("max |H|/scale = {} over {} profiles", g6(worst), profiles),
          "< 1e-8"};
}

Outcome nonexistence_consistency(const IntegratorConfig& cfg) {
  const bool t20 = nonexistence_certificate(3, 10.0, 2.0);
  const bool t31 = nonexistence_certificate(3, 10.0, 3.1);
  const Branch b = trace_branch({3, 10.0}, 1e-2, 1e6, 161, cfg);
  const ThetaMinEstimate est = underline_theta_estimate(b);
  const double bound = kPi - std::asin(4.0 / 9.0) - 1e-6;
  return {t20 && !t31 && est.theta_min >= bound && b.failures.empty(),
          fmt::format("cert(2.0)={} cert(3.1)={} theta_min={}", t20, t31, g6(est.theta_min)),
          fmt::format("true, false, >= {:.7f}", bound)};
}

Outcome slope_cross_check(const IntegratorConfig& cfg) {
  const Params p{3, 7.0};
  int compared = 0, agree = 0;
  for (double G : {0.05, 0.5, 5.0, 50.0, 500.0}) {
    const BranchPoint bp = theta_of_gamma(p, G, cfg);
    const SlopeEstimate fd = finite_difference_slope(p, G, 1e-4, cfg);
    if (!(std::abs(fd.slope) > 10.0 * fd.error)) continue;
    ++compared;
    agree += bp.slope_sign == (fd.slope > 0 ? 1 : -1);
  }
  return {compared > 0 && agree == compared,
          fmt::format("{} of {} resolved points agree (5 sampled)", agree, compared),
          "all resolved points agree"};
}

Outcome p_to_one_limits(const IntegratorConfig& cfg) {
  const double td = theta_dagger(3, cfg);
  const double td_err = std::abs(td - kPi / std::sqrt(2.0));
  const std::vector<double> ps{1.5, 1.2, 1.1, 1.05};
  const auto lo = gamma_p_trend(3, 1.8, ps, cfg);
  const auto hi = gamma_p_trend(3, 2.6, ps, cfg);
  bool up = true, down = true;
  for (std::size_t i = 1; i < ps.size(); ++i) {
    up = up && lo[i].second > lo[i - 1].second;
    down = down && hi[i].second < hi[i - 1].second;
  }
  const double gd = gamma_dagger(3, cfg);
  const double g105 = gamma_p_trend(3, td, {1.05}, cfg)[0].second;
  const double rel = std::abs(g105 - gd) / gd;
  return {td_err < 1e-8 && up && down && rel < 0.2,
          fmt::format("|Theta_dagger err|={} increasing(1.8)={} decreasing(2.6)={} "
                      "Gamma(1.05)/Gamma_dagger-1={}",
                      g6(td_err), up, down, g6(rel)),
          "< 1e-8, true, true, within 20%"};
}

Outcome bessel_limit(const IntegratorConfig& cfg) {
  const auto s = bessel_limit_check(3, {1e2, 1e3, 1e4}, cfg);
  const double e0 = std::abs(s[0].product - kPi), e1 = std::abs(s[1].product - kPi),
               e2 = std::abs(s[2].product - kPi);
  return {e2 < 0.05 && e1 < e0 && e2 < e1,
          fmt::format("errors {} / {} / {}", g6(e0), g6(e1), g6(e2)),
          "< 0.05 at 1e4, decreasing"};
}

Outcome singular_convergence(const IntegratorConfig& cfg) {
  const SingularProfile s = compute_theta_star({3, 7.0}, cfg);
  const auto rows = convergence_study(s, log_grid(10.0, 1e5, 5), s.R_star / 2, cfg);
  bool decreasing = true;
  std::string seq;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0) decreasing = decreasing && rows[i].sup_distance < rows[i - 1].sup_distance;
    seq += (i ? "/" : "") + g6(rows[i].sup_distance);
  }
  const double gap = rows.back().zero_gap;
  return {decreasing && gap < 1e-2,
          fmt::format("sup distance {} |R(1e5)-R*|={}", seq, g6(gap)),
          "decreasing, < 1e-2"};
}

struct CriterionDef {
  const char* title;
  std::function<Outcome(const IntegratorConfig&)> run;
  double time_limit;  // seconds, 0 for none
};

const std::vector<CriterionDef>& definitions() {
  static const std::vector<CriterionDef> s{
      {"closed-form eigenvalues, N=3", eigen_closed_form, 5.0},
      {"exponent identities", exponent_identities, 0.0},
      {"flat singular residual", flat_singular_check, 0.0},
      {"psi0 identity", psi0_identity, 0.0},
      {"critical limits, N=3 p=5", critical_limits, 60.0},
      {"supercritical oscillation, N=3 p=7", supercritical_oscillation, 0.0},
      {"Lyapunov suite, N=3 p=7", lyapunov_suite, 0.0},
      {"intersection growth, N=3 p=7", intersection_growth, 0.0},
      {"Pohozaev endpoints", pohozaev_endpoints, 0.0},
      {"nonexistence consistency, N=3 p=10", nonexistence_consistency, 120.0},
      {"variational slope cross-check, N=3 p=7", slope_cross_check, 0.0},
      {"p -> 1 limits, N=3", p_to_one_limits, 0.0},
      {"Bessel limit, N=3", bessel_limit, 0.0},
      {"singular convergence, N=3 p=7", singular_convergence, 0.0},
  };
  return s;
}

}  // namespace

std::vector<std::string> suite_names() {
  return {"all", "critical-n3", "exponents", "supercritical-n3", "bounds", "limits"};
}

std::vector<int> suite_criteria(std::string_view suite) {
  if (suite == "all") {
    std::vector<int> all;
    for (int i = 1; i <= kCriterionCount; ++i) all.push_back(i);
    return all;
  }
  if (suite == "critical-n3") return {1, 5};
  if (suite == "exponents") return {2, 3, 4};
  if (suite == "supercritical-n3") return {6, 7, 8, 11, 14};
  if (suite == "bounds") return {9, 10};
  if (suite == "limits") return {12, 13};
  throw InvalidArgument("unknown suite '" + std::string(suite) + "'");
}

CriterionResult run_criterion(int id, const IntegratorConfig& cfg) {
  if (id < 1 || id > kCriterionCount) throw InvalidArgument("criterion id out of range");
  const CriterionDef& s = definitions()[id - 1];
  CriterionResult r;
  r.id = id;
  r.title = s.title;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const Outcome o = s.run(cfg);
    r.pass = o.pass;
    r.measured = o.measured;
    r.tolerance = o.tolerance;
  } catch (const Error& e) {
    r.pass = false;
    r.measured = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (s.time_limit > 0.0) {
    r.tolerance += fmt::format("; runtime < {:g} s", s.time_limit);
    if (r.seconds >= s.time_limit) r.pass = false;
  }
  return r;
}

std::vector<CriterionResult> run_suite(std::string_view suite, const IntegratorConfig& cfg) {
  std::vector<CriterionResult> out;
  for (int id : suite_criteria(suite)) out.push_back(run_criterion(id, cfg));
  return out;
}

std::string format_result(const CriterionResult& r) {
  return fmt::format("criterion {:2d} {}  {}: {} | {} | {:.2f} s", r.id, r.pass ? "PASS" : "FAIL",
                     r.title, r.measured, r.tolerance, r.seconds);
}

}  // namespace efcap
