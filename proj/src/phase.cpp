#include "efcap/phase.hpp"

#include <algorithm>
#include <cmath>

#include "efcap/error.hpp"
#include "efcap/singular.hpp"

namespace efcap {

namespace {

// Error scale abs_tol * max_j |y_j| + rel_tol * |y_i|: the orbit state is
// O(1) near the equilibrium, but starts at y ~ 1e-6 where a fixed absolute
// floor would allow large relative errors.
struct NormScale {
  void operator()(double, const ode::State<2>& y0, const ode::State<2>& y1, const ode::State<2>&,
                  const ode::Options& o, ode::State<2>& sc) const {
    const double n = std::max({std::abs(y0[0]), std::abs(y0[1]), std::abs(y1[0]), std::abs(y1[1])});
    for (std::size_t i = 0; i < 2; ++i)
      sc[i] = o.abs_tol * n + o.rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i])) +
              std::numeric_limits<double>::min();
  }
};

Exponents supercritical(const Params& params) {
  params.validate();
  const Exponents e = compute_exponents(params);
  if (classify(params).criticality != Criticality::Supercritical)
    throw InvalidArgument("Emden orbits require p > p_S");
  return e;
}

ode::Options orbit_options(const IntegratorConfig& cfg) {
  ode::Options o;
  o.rel_tol = cfg.rel_tol;
  o.abs_tol = cfg.abs_tol;
  o.h_init = 1e-3;
  o.max_step = std::min(cfg.max_step, 0.1);
  o.max_steps = cfg.max_steps;
  return o;
}

void check(const ode::Result<2>& r) {
  if (r.status == ode::Status::MaxSteps) throw NumericalFailure("orbit: step budget exhausted");
  if (r.status == ode::Status::StepTooSmall) throw NumericalFailure("orbit: step size underflow");
}

double cap_prefactor(const Exponents& e, double p) {
  return std::pow(2.0, -e.q / (p - 1.0)) / *e.a;
}

template <class Rhs>
PhaseOrbit run_orbit(Rhs&& rhs, double t0, double t1, ode::State<2> y0, const IntegratorConfig& cfg,
                     bool cap, double p, const Exponents& e, int N) {
  cfg.validate();
  if (!(t1 > t0)) throw InvalidArgument("t_span must be increasing");
  PhaseOrbit o;
  o.cap = cap;
  if (cap) o.E_trace.emplace();
  auto push = [&](double t, const ode::State<2>& y) {
    o.t.push_back(t);
    o.y.push_back(y[0]);
    o.z.push_back(y[1]);
    o.J_trace.push_back(lyapunov_J(y[0], y[1], p));
    if (cap) o.E_trace->push_back(energy_E(y[0], y[1], t, e, N));
  };
  push(t0, y0);
  auto observer = [&](const ode::DenseSegment<2>& seg, const ode::State<2>& yn) {
    o.segments.push_back(seg);
    if (cap && ((seg.c[0][0] > 0.0) != (yn[0] > 0.0) || yn[0] == 0.0)) {
      const double tz = ode::locate_root(seg, 0, seg.x0, seg.x1());
      o.zero_time = tz;
      push(tz, seg.eval(tz));
      return false;
    }
    push(seg.x1(), yn);
    return true;
  };
  check(ode::integrate<2>(rhs, t0, y0, t1, orbit_options(cfg), observer, NormScale{}));
  return o;
}

}  // namespace

std::pair<double, double> PhaseOrbit::eval(double tt) const {
  if (segments.empty()) throw InvalidArgument("orbit has no dense output");
  auto it = std::lower_bound(segments.begin(), segments.end(), tt,
                             [](const auto& s, double x) { return s.x1() < x; });
  if (it == segments.end()) --it;
  const auto v = it->eval(tt);
  return {v[0], v[1]};
}

double lyapunov_J(double y, double z, double p) {
  return z * z / 2 - y * y / 2 + std::pow(std::abs(y), p + 1) / (p + 1);
}

double energy_H(double y, double z, double p) {
  return z * z / 2 - (y * y - 1) / 2 + (std::pow(std::abs(y), p + 1) - 1) / (p + 1);
}

double energy_E(double y, double z, double t, const Exponents& exp, int N) {
  const double p = 1.0 + 2.0 / exp.mu;
  const CapCoefficients c = cap_coefficients(t, exp, N);
  return energy_H(y, z, p) + c.B0 * std::pow(std::abs(y), p + 1) / (p + 1) + c.B1 * y * y / 2;
}

double flat_orbit_start_time(const Params& params, double gamma_bar, double y0) {
  const Exponents e = supercritical(params);
  if (!(gamma_bar > 0.0) || !(y0 > 0.0)) throw InvalidArgument("gamma_bar and y0 must be positive");
  return std::log(y0 * *e.a / gamma_bar) / (*e.m * e.mu);
}

double cap_orbit_start_time(const Params& params, double gamma, double y0) {
  const Exponents e = supercritical(params);
  if (!(gamma > 0.0) || !(y0 > 0.0)) throw InvalidArgument("gamma and y0 must be positive");
  return std::log(y0 / (cap_prefactor(e, params.p) * gamma)) / (*e.m * e.mu);
}

PhaseOrbit flat_orbit(const Params& params, double gamma_bar, std::pair<double, double> t_span,
                      const IntegratorConfig& cfg) {
  const Exponents e = supercritical(params);
  if (!(gamma_bar > 0.0)) throw InvalidArgument("gamma_bar must be positive");
  const double k = *e.m * e.mu;
  const double y0 = gamma_bar / *e.a * std::exp(k * t_span.first);
  if (!(y0 <= 1e-6 * (1 + 1e-9))) throw InvalidArgument("orbit start is not on the asymptote (y0 > 1e-6)");
  const double alpha = *e.alpha, p = params.p;
  auto rhs = [=](double, const ode::State<2>& y, ode::State<2>& dy) {
    dy[0] = y[1];
    dy[1] = -alpha * y[1] + y[0] - std::pow(std::abs(y[0]), p - 1) * y[0];
  };
  return run_orbit(rhs, t_span.first, t_span.second, {y0, k * y0}, cfg, false, p, e, params.N);
}

PhaseOrbit cap_orbit(const Params& params, double gamma, std::pair<double, double> t_span,
                     const IntegratorConfig& cfg) {
  const Exponents e = supercritical(params);
  if (!(gamma > 0.0)) throw InvalidArgument("gamma must be positive");
  const double k = *e.m * e.mu;
  const double y0 = cap_prefactor(e, params.p) * gamma * std::exp(k * t_span.first);
  if (!(y0 <= 1e-6 * (1 + 1e-9))) throw InvalidArgument("orbit start is not on the asymptote (y0 > 1e-6)");
  const double alpha = *e.alpha, p = params.p;
  const int N = params.N;
  auto rhs = [=](double t, const ode::State<2>& y, ode::State<2>& dy) {
    const CapCoefficients c = cap_coefficients(t, e, N);
    const double yp = std::pow(std::abs(y[0]), p - 1) * y[0];
    dy[0] = y[1];
    dy[1] = -alpha * y[1] + y[0] - yp - c.B0 * yp - c.B1 * y[0];
  };
  return run_orbit(rhs, t_span.first, t_span.second, {y0, k * y0}, cfg, true, p, e, N);
}

EquilibriumReport equilibrium_report(const Exponents& exp, double p) {
  if (!exp.alpha) throw InvalidArgument("equilibrium report needs p >= p_S");
  const double al = *exp.alpha;
  EquilibriumReport r;
  r.discriminant = al * al - 4.0 * (p - 1.0);
  const std::complex<double> sq = std::sqrt(std::complex<double>(r.discriminant, 0.0));
  r.lambda_plus = (-al + sq) / 2.0;
  r.lambda_minus = (-al - sq) / 2.0;
  r.spiral = r.discriminant < 0.0;
  return r;
}

Curve curve_of(const RadialProfile& profile) {
  return {[&profile](double x) { return profile.value_at(x); },
          [&profile](double x) { return profile.derivative_at(x); }};
}

IntersectionResult intersection_count(const Curve& a, const Curve& b,
                                      const std::vector<double>& grid, double noise) {
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw InvalidArgument("grid must increase");
  if (!(noise > 0.0)) throw InvalidArgument("noise must be positive");
  IntersectionResult res;
  auto f = [&](double x) { return a.value(x) - b.value(x); };
  double x_last = 0.0, f_last = 0.0;
  bool have = false;
  for (double x : grid) {
    const double fx = f(x);
    if (fx == 0.0) continue;
    if (have && (fx > 0.0) != (f_last > 0.0)) {
      Crossing c;
      c.x = ode::locate_root(f, x_last, x);
      const double da = a.derivative(c.x), db = b.derivative(c.x);
      c.slope = da - db;
      c.simple = std::abs(c.slope) > 1e3 * noise * (std::abs(da) + std::abs(db));
      (c.simple ? res.count : res.indeterminate) += 1;
      res.crossings.push_back(c);
    }
    x_last = x;
    f_last = fx;
    have = true;
  }
  return res;
}

IntersectionResult intersection_count(const RadialProfile& a, const RadialProfile& b,
                                      std::pair<double, double> interval, int refine,
                                      double noise) {
  const auto [lo, hi] = interval;
  if (!(hi > lo)) throw InvalidArgument("empty interval");
  if (refine < 1) throw InvalidArgument("refine must be at least 1");
  if (a.empty() || b.empty()) throw InvalidArgument("empty profile");
  if (lo < std::max(a.lower(), b.lower()) || hi > std::min(a.upper(), b.upper()))
    throw InvalidArgument("interval exceeds a profile's range");
  std::vector<double> nodes{lo, hi};
  for (const auto* p : {&a, &b})
    for (double x : p->grid)
      if (x > lo && x < hi) nodes.push_back(x);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  std::vector<double> grid;
  grid.reserve(nodes.size() * static_cast<std::size_t>(refine));
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
    for (int j = 0; j < refine; ++j) grid.push_back(nodes[i] + (nodes[i + 1] - nodes[i]) * j / refine);
  grid.push_back(nodes.back());
  return intersection_count(curve_of(a), curve_of(b), grid, noise);
}

IntersectionResult flat_intersections(const Params& params, double gamma_bar, double rho_lo,
                                      double rho_max, const IntegratorConfig& cfg, int refine) {
  supercritical(params);
  if (!(rho_lo > 0.0 && rho_max > rho_lo)) throw InvalidArgument("need 0 < rho_lo < rho_max");
  if (refine < 1) throw InvalidArgument("refine must be at least 1");
  const RadialProfile prof = integrate_flat_regular(params, gamma_bar, rho_max, cfg);
  if (rho_lo < prof.lower()) throw InvalidArgument("rho_lo below the regular start offset");
  const double hi = prof.first_zero ? *prof.first_zero : rho_max;
  std::vector<double> g{rho_lo};
  for (std::size_t i = 0; i + 1 < prof.grid.size(); ++i)
    for (int j = 0; j < refine; ++j) {
      const double x = prof.grid[i] + (prof.grid[i + 1] - prof.grid[i]) * j / refine;
      if (x > rho_lo && x < hi) g.push_back(x);
    }
  g.push_back(hi);
  const Curve singular{[&](double r) { return flat_singular(params, r).value; },
                       [&](double r) { return flat_singular(params, r).d1; }};
  return intersection_count(curve_of(prof), singular, g);
}

IntersectionResult cap_intersections(const Params& params, double gamma, const IntegratorConfig& cfg,
                                     int refine) {
  supercritical(params);
  if (!(gamma > 0.0)) throw InvalidArgument("gamma must be positive");
  const double k = (params.N - 2.0) / 2.0;
  const RadialProfile reg = integrate_sphere_regular(params, std::pow(2.0, -k) * gamma, cfg);
  SingularOptions so;
  so.theta0 = std::min(1e-4, 1e-3 * std::pow(gamma, -(params.p - 1.0) / 2.0));
  const SingularProfile s = compute_theta_star(params, cfg, so);
  const double lo = std::max(reg.lower(), s.profile.lower());
  const double hi = std::min(*reg.first_zero, *s.profile.first_zero) * (1 - 1e-12);
  return intersection_count(reg, s.profile, {lo, hi}, refine);
}

double trapping_epsilon(double p) { return (p - 1.0) / (8.0 * (p + 1.0)); }

TrappingReport trapping_monitor(const PhaseOrbit& orbit, const Params& params, double eps) {
  const Exponents e = supercritical(params);
  if (!orbit.cap) throw InvalidArgument("trapping is monitored on cap orbits");
  if (!(eps > 0.0)) throw InvalidArgument("eps must be positive");
  const double p = params.p;
  const double xi = xi_intercept(p);
  const double w0 = std::pow(xi, p + 1) / (p + 1), w1 = xi * xi / 2;
  auto small_coeffs = [&](double t) {
    const CapCoefficients c = cap_coefficients(t, e, params.N);
    return w0 * c.B0 <= eps / 8 && w1 * c.B1 <= eps / 8;
  };
  TrappingReport r;
  std::size_t i0 = 0;
  for (; i0 < orbit.t.size(); ++i0) {
    if (!small_coeffs(orbit.t[i0])) return r;
    if (orbit.y[i0] > 0.0 && energy_H(orbit.y[i0], orbit.z[i0], p) < eps) break;
  }
  if (i0 == orbit.t.size()) return r;
  r.entered = true;
  r.t_enter = orbit.t[i0];
  std::size_t i1 = i0;
  while (i1 + 1 < orbit.t.size() && small_coeffs(orbit.t[i1 + 1])) ++i1;
  r.t_horizon = orbit.t[i1];
  for (std::size_t i = i0; i <= i1; ++i)
    r.max_H_after = std::max(r.max_H_after, energy_H(orbit.y[i], orbit.z[i], p));
  r.stayed = r.max_H_after < 2 * eps;
  const auto& E = *orbit.E_trace;
  r.energy_increase = E[i1] - E[i0];
  const CapCoefficients cT = cap_coefficients(r.t_horizon, e, params.N);
  r.energy_bound = w0 * cT.B0 + w1 * cT.B1;
  return r;
}

}  // namespace efcap
