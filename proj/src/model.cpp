#include "efcap/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "efcap/error.hpp"

namespace efcap {

void Params::validate() const {
  if (N < 3) throw InvalidArgument("N must be at least 3, got " + std::to_string(N));
  if (!(p > 1.0) || !std::isfinite(p))
    throw InvalidArgument("p must be a finite real > 1, got " + std::to_string(p));
}

std::string_view to_string(Criticality c) {
  switch (c) {
    case Criticality::Subcritical:
      return "Subcritical";
    case Criticality::Critical:
      return "Critical";
    case Criticality::Supercritical:
      return "Supercritical";
  }
  return "unknown";
}

std::string_view to_string(JLPosition j) {
  return j == JLPosition::BelowJL ? "BelowJL" : "AtOrAboveJL";
}

double sobolev_exponent(int N) {
  if (N <= 2) return std::numeric_limits<double>::infinity();
  return static_cast<double>(N + 2) / static_cast<double>(N - 2);
}

double joseph_lundgren_exponent(int N) {
  if (N <= 10) return std::numeric_limits<double>::infinity();
  return 1.0 + 4.0 / (N - 4.0 - 2.0 * std::sqrt(N - 1.0));
}

namespace {

bool at_least_critical(double p, double p_S) {
  return p > p_S || std::abs(p - p_S) <= 4.0 * std::numeric_limits<double>::epsilon() * p_S;
}

bool spiral_window(int N, double mu) {
  const double w = 2.0 * std::sqrt(N - 1.0);
  return (N - 4.0 - w) / 2.0 < mu && mu < (N - 4.0 + w) / 2.0;
}

}  // namespace

Exponents compute_exponents(const Params& params) {
  params.validate();
  const int N = params.N;
  const double p = params.p;
  Exponents e;
  e.p_S = sobolev_exponent(N);
  e.p_JL = joseph_lundgren_exponent(N);
  e.mu = 2.0 / (p - 1.0);
  e.q = (N - 2.0) * (p - e.p_S) / 2.0;
  if (at_least_critical(p, e.p_S)) {
    const double k = e.mu * (N - 2.0 - e.mu);
    const double a = std::pow(k, e.mu / 2.0);
    const double m = std::pow(a, -(p - 1.0) / 2.0);
    e.a = a;
    e.m = m;
    e.alpha = std::abs(p - e.p_S) <= 4.0 * std::numeric_limits<double>::epsilon() * e.p_S
                  ? 0.0
                  : m * (N - 2.0 - 2.0 * e.mu);
    if (spiral_window(N, e.mu)) {
      const double half = *e.alpha / 2.0;
      e.beta = std::sqrt((p - 1.0) - half * half);
    }
  }
  return e;
}

Regime classify(const Params& params) {
  params.validate();
  const double p_S = sobolev_exponent(params.N);
  Regime r;
  if (std::abs(params.p - p_S) <= 4.0 * std::numeric_limits<double>::epsilon() * p_S)
    r.criticality = Criticality::Critical;
  else if (params.p > p_S)
    r.criticality = Criticality::Supercritical;
  else
    r.criticality = Criticality::Subcritical;
  r.jl_position = params.N >= 11 && params.p >= joseph_lundgren_exponent(params.N)
                      ? JLPosition::AtOrAboveJL
                      : JLPosition::BelowJL;
  r.spiral = spiral_window(params.N, 2.0 / (params.p - 1.0));
  return r;
}

double xi_intercept(double p) { return std::pow((p + 1.0) / 2.0, 1.0 / (p - 1.0)); }

CapCoefficients cap_coefficients(double t, const Exponents& exp, int N) {
  if (!exp.m) throw InvalidArgument("cap_coefficients needs p >= p_S (m undefined)");
  const double m = *exp.m;
  const double q = exp.q;
  const double s = 2.0 * m * t;
  const double nn = N * (N - 2.0);
  CapCoefficients c;
  // log(1 + e^s) and x/(1+x)^2 in forms that neither overflow nor cancel.
  const double log1pe = s > 0.0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s));
  c.B0 = std::expm1(q * log1pe);
  const double xm = std::exp(-std::abs(s));  // e^{-|s|}
  const double ratio = xm / ((1.0 + xm) * (1.0 + xm));  // e^s/(1+e^s)^2, symmetric in s
  c.B1 = m * m * nn * ratio;
  // (1-x)/(1+x) with x = e^s equals -tanh(s/2).
  c.dB1 = 2.0 * m * c.B1 * (-std::tanh(s / 2.0));
  // dB0/dt = 2mq (1+x)^(q-1) x = 2mq (1+x)^q * x/(1+x)
  const double logistic = s > 0.0 ? 1.0 / (1.0 + std::exp(-s)) : std::exp(s) / (1.0 + std::exp(s));
  c.dB0 = 2.0 * m * q * std::exp(q * log1pe) * logistic;
  return c;
}

double stereographic_r(double theta, double theta_complement) {
  if (theta <= std::numbers::pi / 2) return std::tan(theta / 2.0);
  return 1.0 / std::tan(theta_complement / 2.0);
}

namespace {

// A = 1 + cos(theta), evaluated from the nearer pole.
double conformal_from_theta(double theta, double comp) {
  if (theta <= std::numbers::pi / 2) {
    const double c = std::cos(theta / 2.0);
    return 2.0 * c * c;
  }
  const double s = std::sin(comp / 2.0);
  return 2.0 * s * s;
}

}  // namespace

RadialProfile stereographic_u_from_U(const RadialProfile& in, int N) {
  if (in.kind != ProfileKind::ThetaOnSphere)
    throw InvalidArgument("stereographic_u_from_U expects a theta_on_sphere profile");
  const double k = (N - 2.0) / 2.0;
  RadialProfile out;
  out.kind = ProfileKind::RStereographic;
  out.error_estimate = in.error_estimate;
  out.steps = in.steps;
  for (std::size_t i = 0; i < in.grid.size(); ++i) {
    const double th = in.grid[i];
    const double comp = in.complement.empty() ? std::numbers::pi - th : in.complement[i];
    if (!(th > 0.0) || !(comp > 0.0) || th >= std::numbers::pi)
      throw InvalidArgument("stereographic transform requires theta in (0, pi)");
    const double r = stereographic_r(th, comp);
    const double A = conformal_from_theta(th, comp);
    const double Ak = std::pow(A, k);
    const double U = in.value[i], dU = in.derivative[i];
    out.push_node(r, Ak * U, Ak * A * (dU - k * r * U));
  }
  if (in.first_zero) {
    const double th = *in.first_zero;
    const double comp = in.first_zero_complement.value_or(std::numbers::pi - th);
    const double r = stereographic_r(th, comp);
    const double A = conformal_from_theta(th, comp);
    out.first_zero = r;
    out.end_derivative = std::pow(A, k + 1.0) * in.end_derivative;
  }
  return out;
}

RadialProfile stereographic_U_from_u(const RadialProfile& in, int N) {
  if (in.kind != ProfileKind::RStereographic)
    throw InvalidArgument("stereographic_U_from_u expects an r_stereographic profile");
  const double k = (N - 2.0) / 2.0;
  RadialProfile out;
  out.kind = ProfileKind::ThetaOnSphere;
  out.error_estimate = in.error_estimate;
  out.steps = in.steps;
  for (std::size_t i = 0; i < in.grid.size(); ++i) {
    const double r = in.grid[i];
    if (!(r >= 0.0) || !std::isfinite(r)) throw InvalidArgument("r must be finite and >= 0");
    const double th = 2.0 * std::atan(r);
    const double comp = r > 0.0 ? 2.0 * std::atan(1.0 / r) : std::numbers::pi;
    const double A = conformal_factor(r);
    const double U = in.value[i] * std::pow(A, -k);
    const double dU = in.derivative[i] * std::pow(A, -(k + 1.0)) + k * r * U;
    out.push_node(th, U, dU, comp);
  }
  if (in.first_zero) {
    const double r = *in.first_zero;
    out.first_zero = 2.0 * std::atan(r);
    out.first_zero_complement = 2.0 * std::atan(1.0 / r);
    out.end_derivative = in.end_derivative * std::pow(conformal_factor(r), -(k + 1.0));
  }
  return out;
}

EmdenSamples emden_from_u(const RadialProfile& prof, const Exponents& exp) {
  if (!exp.a || !exp.m) throw InvalidArgument("emden_from_u needs p >= p_S");
  if (prof.kind == ProfileKind::ThetaOnSphere)
    throw InvalidArgument("emden_from_u expects an r or rho profile");
  const double a = *exp.a, m = *exp.m, mu = exp.mu;
  const double p = 1.0 + 2.0 / mu;
  const double q = prof.kind == ProfileKind::RhoFlat ? 0.0 : exp.q;
  const double pref = std::pow(2.0, -q / (p - 1.0)) / a;
  EmdenSamples s;
  for (std::size_t i = 0; i < prof.grid.size(); ++i) {
    const double r = prof.grid[i];
    if (!(r > 0.0)) continue;
    const double rm = std::pow(r, mu);
    s.t.push_back(std::log(r) / m);
    s.y.push_back(pref * prof.value[i] * rm);
    s.z.push_back(pref * m * rm * (r * prof.derivative[i] + mu * prof.value[i]));
  }
  return s;
}

}  // namespace efcap
