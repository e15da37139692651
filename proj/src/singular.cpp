#include "efcap/singular.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "efcap/error.hpp"

namespace efcap {

namespace {

constexpr double kPi = std::numbers::pi;

Exponents supercritical(const Params& params) {
  params.validate();
  const Exponents e = compute_exponents(params);
  if (classify(params).criticality != Criticality::Supercritical)
    throw InvalidArgument("singular solutions require p > p_S");
  return e;
}

// U(theta) mapped to u(r) = A^k U at r = tan(theta/2), for theta < pi.
double u_of_r(const RadialProfile& prof, double r, double k) {
  const double theta = 2.0 * std::atan(r);
  return std::pow(conformal_factor(r), k) * prof.value_at(theta);
}

}  // namespace

SingularStart singular_start_values(const Params& params, double theta0) {
  const Exponents e = supercritical(params);
  if (!(theta0 > 0.0 && theta0 <= 1e-2)) throw InvalidArgument("theta0 must lie in (0, 1e-2]");
  const double a = *e.a, mu = e.mu;
  const int N = params.N;
  const double c = std::cos(theta0 / 2), s = std::sin(theta0 / 2);
  const double t2 = 2.0 * std::tan(theta0 / 2);
  SingularStart st;
  st.U0 = a * std::pow(c, -(N - 2.0)) * std::pow(t2, -mu);
  st.dU0 = a * std::pow(c, -static_cast<double>(N)) * std::pow(t2, -mu - 1.0) *
           (-mu + (N - 2.0) * s * s);
  return st;
}

RadialProfile integrate_singular(const Params& params, double theta0, const IntegratorConfig& cfg) {
  const SingularStart st = singular_start_values(params, theta0);
  return shoot_sphere({params.N, params.p, 1.0}, theta0, st.U0, st.dU0, cfg);
}

SingularProfile compute_theta_star(const Params& params, const IntegratorConfig& cfg,
                                   const SingularOptions& opts) {
  supercritical(params);
  if (opts.halvings < 1) throw InvalidArgument("at least one start halving is required");
  if (!(opts.convergence_tol > 0.0)) throw InvalidArgument("convergence_tol must be positive");

  SingularProfile out;
  out.params = params;
  double th = opts.theta0;
  for (int i = 0; i <= opts.halvings; ++i, th /= 2) {
    RadialProfile prof = integrate_singular(params, th, cfg);
    out.raw_zeros.push_back(*prof.first_zero);
    if (i == opts.halvings) {
      out.theta_start = th;
      out.Theta_star_complement = *prof.first_zero_complement;
      out.profile = std::move(prof);
    }
  }
  const auto& z = out.raw_zeros;
  const std::size_t n = z.size();
  out.refinement_estimate = std::abs(z[1] - z[0]);
  const double last = std::abs(z[n - 1] - z[n - 2]);
  if (last > opts.convergence_tol)
    throw NumericalFailure("singular start refinement did not converge (change " +
                           std::to_string(last) + "); decrease theta0 or tighten tolerances");

  out.Theta_star = z[n - 1];
  if (n >= 3) {
    const double d1 = z[n - 2] - z[n - 3], d2 = z[n - 1] - z[n - 2];
    // Extrapolate only when the differences shrink geometrically with a
    // sensible order; otherwise they are integration noise.
    const double noise = 10.0 * out.profile.error_estimate;
    if (std::abs(d2) > noise && d1 * d2 > 0.0) {
      const double order = std::log2(d1 / d2);
      if (order > 0.5 && order < 8.0) {
        out.observed_order = order;
        out.Theta_star = z[n - 1] + d2 / (std::exp2(order) - 1.0);
      }
    }
  }
  out.Theta_star_complement += z[n - 1] - out.Theta_star;
  out.R_star = stereographic_r(out.Theta_star, out.Theta_star_complement);
  return out;
}

DecayFit asymptotic_decay_check(const SingularProfile& sing, const Exponents& exp, double r_lo,
                                double r_hi) {
  if (!exp.m || !exp.a) throw InvalidArgument("decay check needs supercritical exponents");
  if (!(r_hi > r_lo)) throw InvalidArgument("empty decay window");
  const RadialProfile u = stereographic_u_from_U(sing.profile, sing.params.N);
  const EmdenSamples s = emden_from_u(u, exp);
  DecayFit fit;
  fit.y_minus_one_at_start = std::abs(s.y.front() - 1.0);
  // Least squares of log|y-1| on t.
  double st = 0, sy = 0, stt = 0, sty = 0;
  int n = 0;
  const double t_lo = r_lo > 0 ? std::log(r_lo) / *exp.m : -INFINITY;
  const double t_hi = std::log(r_hi) / *exp.m;
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    if (s.t[i] < t_lo || s.t[i] > t_hi) continue;
    const double d = std::abs(s.y[i] - 1.0);
    if (!(d > 0.0)) continue;
    const double ly = std::log(d);
    st += s.t[i];
    sy += ly;
    stt += s.t[i] * s.t[i];
    sty += s.t[i] * ly;
    ++n;
  }
  if (n < 8) throw InvalidArgument("decay window holds fewer than 8 samples");
  fit.samples = n;
  fit.rate = (n * sty - st * sy) / (n * stt - st * st);
  return fit;
}

std::vector<ConvergenceRow> convergence_study(const SingularProfile& sing,
                                              const std::vector<double>& gamma_list, double r0,
                                              const IntegratorConfig& cfg, int samples) {
  const Params& params = sing.params;
  supercritical(params);
  if (!(r0 > 0.0 && r0 < sing.R_star)) throw InvalidArgument("r0 must lie in (0, R*)");
  if (samples < 2) throw InvalidArgument("samples must be at least 2");
  for (std::size_t i = 1; i < gamma_list.size(); ++i)
    if (!(gamma_list[i] > gamma_list[i - 1])) throw InvalidArgument("gamma_list must increase");

  const double k = (params.N - 2.0) / 2.0;
  std::vector<ConvergenceRow> rows;
  for (double gamma : gamma_list) {
    if (!(gamma > 0.0)) throw InvalidArgument("gamma must be positive");
    const RadialProfile reg = integrate_sphere_regular(params, std::pow(2.0, -k) * gamma, cfg);
    const double R = stereographic_r(*reg.first_zero, *reg.first_zero_complement);
    ConvergenceRow row;
    row.gamma = gamma;
    row.zero_gap = std::abs(R - sing.R_star);
    row.below_singular_at_r0 = u_of_r(reg, r0, k) < u_of_r(sing.profile, r0, k);
    const double r1 = std::min(R, sing.R_star);
    if (r1 > r0) {
      for (int j = 0; j < samples; ++j) {
        const double r = r0 + (r1 - r0) * j / (samples - 1.0);
        row.sup_distance = std::max(row.sup_distance,
                                    std::abs(u_of_r(reg, r, k) - u_of_r(sing.profile, r, k)));
      }
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace efcap
