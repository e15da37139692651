#include "efcap/integrate.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>
#include <string>

#include "efcap/error.hpp"
#include "efcap/ode.hpp"

namespace efcap {

namespace {

constexpr double kPi = std::numbers::pi;

ode::Options ode_options(const IntegratorConfig& cfg, double h_init) {
  ode::Options o;
  o.rel_tol = cfg.rel_tol;
  o.abs_tol = cfg.abs_tol;
  o.h_init = h_init;
  o.max_step = cfg.max_step;
  o.max_steps = cfg.max_steps;
  return o;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

template <std::size_t Dim>
void check_status(const ode::Result<Dim>& res, const char* what) {
  switch (res.status) {
    case ode::Status::Reached:
    case ode::Status::Stopped:
      return;
    case ode::Status::MaxSteps:
      throw NumericalFailure(std::string(what) + ": step budget exhausted at x = " +
                             num(res.x) + " (tolerance too tight?)");
    case ode::Status::StepTooSmall:
      throw NumericalFailure(std::string(what) + ": step size underflow at x = " +
                             num(res.x));
  }
}

bool crossed(double a, double b) { return (a > 0.0) != (b > 0.0) || b == 0.0; }

double heuristic_error(const RadialProfile& prof, const IntegratorConfig& cfg, double scale) {
  const double eps = std::numeric_limits<double>::epsilon();
  return static_cast<double>(prof.steps) * (cfg.rel_tol + cfg.abs_tol) * scale +
         4.0 * eps * std::abs(*prof.first_zero);
}

}  // namespace

void IntegratorConfig::validate() const {
  if (!(rel_tol > 0.0 && rel_tol <= 1e-3))
    throw InvalidArgument("rel_tol must lie in (0, 1e-3]");
  if (!(abs_tol > 0.0)) throw InvalidArgument("abs_tol must be positive");
  if (!(theta_start > 0.0 && theta_start < 1e-2))
    throw InvalidArgument("theta_start must lie in (0, 1e-2)");
  if (!(max_step > 0.0)) throw InvalidArgument("max_step must be positive");
  if (max_steps <= 0) throw InvalidArgument("max_steps must be positive");
}

IntegratorConfig IntegratorConfig::tightened(double factor) const {
  IntegratorConfig c = *this;
  c.rel_tol /= factor;
  c.abs_tol /= factor;
  c.estimate_error = false;
  return c;
}

namespace {

void check_sphere_inputs(const SphereProblem& prob, double theta0) {
  if (prob.N < 3) throw InvalidArgument("N must be at least 3");
  if (!(prob.p >= 1.0)) throw InvalidArgument("exponent must be >= 1");
  if (!(prob.coefficient > 0.0)) throw InvalidArgument("coefficient must be positive");
  if (!(theta0 > 0.0 && theta0 < kPi / 2))
    throw InvalidArgument("start offset must lie in (0, pi/2)");
}

ode::DenseSegment<2> component_pair(const ode::DenseSegment<4>& s, std::size_t off) {
  ode::DenseSegment<2> d;
  d.x0 = s.x0;
  d.h = s.h;
  for (std::size_t j = 0; j < 5; ++j) d.c[j] = {s.c[j][off], s.c[j][off + 1]};
  return d;
}

// Conformal image on the sphere of the flat critical bubble,
//   B(theta) = Gamma (cos^2(theta/2) + kappa sin^2(theta/2))^(-k),
// kappa = 4 c Gamma^(p-1) / (N(N-2)), k = (N-2)/2. At p = p_S it solves
// B'' + (N-1) cot B' + c B^p = N(N-2)/4 B, and dB/dGamma solves the
// corresponding linearization.
struct BubbleReference {
  double Gamma = 0.0;
  double kappa = 0.0;
  double k = 0.0;
  double forcing = 0.0;  // N(N-2)/4

  struct Value {
    double B, dB, BG, dBG;  // d/dtheta
  };
  // s2 = sin^2(theta/2), c2 = cos^2(theta/2), passed in complement-safe form.
  Value eval(double s2, double c2, double sin_theta) const {
    const double D = c2 + kappa * s2;
    const double dD = (kappa - 1.0) * sin_theta / 2.0;
    const double Dk = std::pow(D, -k);
    Value v;
    v.B = Gamma * Dk;
    v.dB = -k * Gamma * Dk / D * dD;
    // dkappa/dGamma = (2/k) kappa / Gamma.
    v.BG = Dk * (1.0 - 2.0 * kappa * s2 / D);
    v.dBG = -k * Dk / D * dD -
            2.0 * kappa * Dk / D * (sin_theta / 2.0 - (k + 1.0) * s2 * dD / D);
    return v;
  }
};

double pow_diff(double U, double B, double e) {
  // |U|^e sgn(U) - B^e for B > 0, without cancellation when U is close to B.
  const double t = (U - B) / B;
  if (std::abs(t) <= 0.5) return std::pow(B, e) * std::expm1(e * std::log1p(t));
  return std::pow(std::abs(U), e) * (U < 0.0 ? -1.0 : 1.0) - std::pow(B, e);
}

// Shoot in the north chart up to the equator and in the south chart beyond
// it. Dim = 2 carries (U, U'); Dim = 4 adds the variation (W, W') of U with
// respect to its value at the pole, stored in *wprof. With a bubble reference
// the state holds U - B and W - dB/dGamma instead.
template <std::size_t Dim>
void sphere_driver(const SphereProblem& prob, double theta0, const ode::State<Dim>& y0,
                   const IntegratorConfig& cfg, const ShootOptions& opts, RadialProfile& prof,
                   RadialProfile* wprof, const BubbleReference* ref = nullptr) {
  cfg.validate();
  check_sphere_inputs(prob, theta0);
  for (double v : y0)
    if (!std::isfinite(v)) throw InvalidArgument("non-finite start data");

  const double nm1 = prob.N - 1.0;
  const double c = prob.coefficient;
  const double p = prob.p;
  const bool linear = p == 1.0;
  bool south = false;

  // Reference values in the current chart coordinate.
  auto ref_at = [&](double x) {
    const double h = std::sin(x / 2.0), g = std::cos(x / 2.0);
    const double s2 = south ? g * g : h * h;
    const double c2 = south ? h * h : g * g;
    auto v = ref->eval(s2, c2, std::sin(x));
    if (south) {
      v.dB = -v.dB;
      v.dBG = -v.dBG;
    }
    return v;
  };

  auto rhs = [&](double x, const ode::State<Dim>& y, ode::State<Dim>& dy) {
    const double cot = std::cos(x) / std::sin(x);
    if (!ref) {
      const double up = linear ? 1.0 : std::pow(std::abs(y[0]), p - 1.0);
      dy[0] = y[1];
      dy[1] = -nm1 * cot * y[1] - c * up * y[0];
      if constexpr (Dim == 4) {
        dy[2] = y[3];
        dy[3] = -nm1 * cot * y[3] - p * c * up * y[2];
      }
      return;
    }
    const auto b = ref_at(x);
    const double U = b.B + y[0];
    dy[0] = y[1];
    dy[1] = -nm1 * cot * y[1] - c * pow_diff(U, b.B, p) - ref->forcing * b.B;
    if constexpr (Dim == 4) {
      const double up = std::pow(std::abs(U), p - 1.0);
      dy[2] = y[3];
      dy[3] = -nm1 * cot * y[3] - p * c * up * y[2] -
              p * c * pow_diff(std::abs(U), b.B, p - 1.0) * b.BG - ref->forcing * b.BG;
    }
  };
  const ode::LocalScale scale{1.0};

  // Physical (U, dU/dx, W, dW/dx) in the chart coordinate.
  auto physical = [&](double x, const ode::State<Dim>& y) {
    ode::State<Dim> u = y;
    if (ref) {
      const auto b = ref_at(x);
      u[0] += b.B;
      u[1] += b.dB;
      if constexpr (Dim == 4) {
        u[2] += b.BG;
        u[3] += b.dBG;
      }
    }
    return u;
  };

  prof = RadialProfile{};
  prof.kind = ProfileKind::ThetaOnSphere;
  {
    const auto u0 = physical(theta0, y0);
    prof.push_node(theta0, u0[0], u0[1], kPi - theta0);
    if constexpr (Dim == 4) {
      *wprof = RadialProfile{};
      wprof->kind = ProfileKind::ThetaOnSphere;
      wprof->push_node(theta0, u0[2], u0[3], kPi - theta0);
    }
  }

  const bool to_pole = opts.theta_end >= kPi;
  const double north_end = to_pole ? kPi / 2 : std::min(kPi / 2, opts.theta_end);
  bool stopped = false;

  // theta, d/dtheta sign and complement for a chart coordinate x.
  auto theta_of = [&](double x) { return south ? kPi - x : x; };
  auto comp_of = [&](double x) { return south ? x : kPi - x; };
  const auto push = [&](double x, const ode::State<Dim>& y) {
    const double sg = south ? -1.0 : 1.0;
    const auto u = physical(x, y);
    prof.push_node(theta_of(x), u[0], sg * u[1], comp_of(x));
    if constexpr (Dim == 4) wprof->push_node(theta_of(x), u[2], sg * u[3], comp_of(x));
  };
  auto observer = [&](const ode::DenseSegment<Dim>& seg, const ode::State<Dim>& yn) {
    const Chart chart = south ? Chart::South : Chart::North;
    // Dense output is stored only for the unsplit state; split profiles fall
    // back to Hermite interpolation of the physical nodes.
    if (!ref) {
      if constexpr (Dim == 2) {
        prof.push_segment({seg, chart}, theta_of(seg.x1()));
      } else {
        prof.push_segment({component_pair(seg, 0), chart}, theta_of(seg.x1()));
        wprof->push_segment({component_pair(seg, 2), chart}, theta_of(seg.x1()));
      }
    }
    auto u_at = [&](double x) { return physical(x, seg.eval(x))[0]; };
    const double u_lo = ref ? u_at(seg.x0) : seg.c[0][0];
    const double u_hi = ref ? physical(seg.x1(), yn)[0] : yn[0];
    if (!prof.first_zero && crossed(u_lo, u_hi)) {
      const double xz = ode::locate_root(u_at, seg.x0, seg.x1());
      const auto yz = seg.eval(xz);
      const auto uz = physical(xz, yz);
      prof.first_zero = theta_of(xz);
      prof.first_zero_complement = comp_of(xz);
      prof.end_derivative = south ? -uz[1] : uz[1];
      if (opts.stop_at_first_zero) {
        push(xz, yz);
        stopped = true;
        return false;
      }
    }
    push(seg.x1(), yn);
    return true;
  };

  ode::State<Dim> y = y0;
  if (theta0 < north_end) {
    const auto res = ode::integrate<Dim>(rhs, theta0, y, north_end,
                                         ode_options(cfg, theta0 * 1e-2), observer, scale);
    check_status(res, "sphere shoot");
    prof.steps += res.accepted;
    y = res.y;
  }
  if (!stopped && (to_pole || opts.theta_end > kPi / 2)) {
    south = true;
    const double phi0 = kPi - north_end;
    const double phi_end = to_pole ? kSouthPoleFloor : kPi - opts.theta_end;
    for (std::size_t i = 1; i < Dim; i += 2) y[i] = -y[i];
    const auto res =
        ode::integrate<Dim>(rhs, phi0, y, phi_end, ode_options(cfg, 1e-3), observer, scale);
    check_status(res, "sphere shoot (south chart)");
    prof.steps += res.accepted;
  }
  if (wprof) wprof->steps = prof.steps;

  if (prof.first_zero) {
    prof.error_estimate =
        heuristic_error(prof, cfg, std::min(*prof.first_zero, *prof.first_zero_complement));
  } else if (opts.require_zero) {
    throw NumericalFailure("no zero found before the south pole");
  }
}

// The bubble split pays off once the core is narrower than the cap; for
// smaller Gamma U and B differ by O(1) and the unsplit form is better.
std::optional<BubbleReference> bubble_reference(const SphereProblem& prob, double Gamma) {
  const double pS = (prob.N + 2.0) / (prob.N - 2.0);
  if (std::abs(prob.p - pS) > 4.0 * std::numeric_limits<double>::epsilon() * pS)
    return std::nullopt;
  const double s = prob.coefficient * std::pow(Gamma, prob.p - 1.0);
  if (s < 1.0) return std::nullopt;
  BubbleReference r;
  r.Gamma = Gamma;
  r.k = (prob.N - 2.0) / 2.0;
  r.kappa = 4.0 * s / (prob.N * (prob.N - 2.0));
  r.forcing = prob.N * (prob.N - 2.0) / 4.0;
  return r;
}

}  // namespace

RadialProfile shoot_sphere(const SphereProblem& prob, double theta0, double U0, double V0,
                           const IntegratorConfig& cfg, const ShootOptions& opts) {
  RadialProfile prof;
  sphere_driver<2>(prob, theta0, {U0, V0}, cfg, opts, prof, nullptr);
  return prof;
}

SphereVariation shoot_sphere_variational(const SphereProblem& prob, double Gamma,
                                         const IntegratorConfig& cfg, const ShootOptions& opts) {
  if (!(Gamma > 0.0) || !std::isfinite(Gamma)) throw InvalidArgument("Gamma must be positive");
  const double th0 = regular_start_offset(prob, Gamma, cfg);
  const double n = prob.N;
  SphereVariation out;
  if (const auto ref = bubble_reference(prob, Gamma)) {
    // U - B and W - dB/dGamma start as -(N-2)/8 th^2 times Gamma and 1.
    const double a = (n - 2.0) / 8.0;
    const ode::State<4> y0{-a * Gamma * th0 * th0, -2 * a * Gamma * th0, -a * th0 * th0,
                           -2 * a * th0};
    sphere_driver<4>(prob, th0, y0, cfg, opts, out.U, &out.W, &*ref);
  } else {
    // U = Gamma - c Gamma^p th^2/(2N), W = dU/dGamma = 1 - p c Gamma^(p-1) th^2/(2N).
    const double f0 = prob.coefficient * std::pow(Gamma, prob.p);
    const double g0 = prob.p * prob.coefficient * std::pow(Gamma, prob.p - 1.0);
    const ode::State<4> y0{Gamma - f0 * th0 * th0 / (2 * n), -f0 * th0 / n,
                           1.0 - g0 * th0 * th0 / (2 * n), -g0 * th0 / n};
    sphere_driver<4>(prob, th0, y0, cfg, opts, out.U, &out.W);
  }
  if (out.U.first_zero) {
    out.W_at_zero = out.W.value.back();
    if (!opts.stop_at_first_zero) out.W_at_zero = out.W.value_at(*out.U.first_zero);
  }
  return out;
}

double regular_start_offset(const SphereProblem& prob, double Gamma, const IntegratorConfig& cfg) {
  const double k = prob.coefficient * std::pow(Gamma, prob.p - 1.0);
  const double L = std::min(1.0, 1.0 / std::sqrt(k));
  return cfg.theta_start * L;
}

RadialProfile shoot_sphere_regular(const SphereProblem& prob, double Gamma,
                                   const IntegratorConfig& cfg, const ShootOptions& opts) {
  if (!(Gamma > 0.0) || !std::isfinite(Gamma)) throw InvalidArgument("Gamma must be positive");
  const double th0 = regular_start_offset(prob, Gamma, cfg);
  if (const auto ref = bubble_reference(prob, Gamma)) {
    const double a = (prob.N - 2.0) / 8.0;
    RadialProfile prof;
    sphere_driver<2>(prob, th0, {-a * Gamma * th0 * th0, -2 * a * Gamma * th0}, cfg, opts, prof,
                     nullptr, &*ref);
    return prof;
  }
  const double f0 = prob.coefficient * std::pow(Gamma, prob.p);
  const double U0 = Gamma - f0 * th0 * th0 / (2.0 * prob.N);
  const double V0 = -f0 * th0 / prob.N;
  return shoot_sphere(prob, th0, U0, V0, cfg, opts);
}

RadialProfile integrate_sphere_regular(const Params& params, double Gamma,
                                       const IntegratorConfig& cfg) {
  params.validate();
  const SphereProblem prob{params.N, params.p, 1.0};
  RadialProfile prof = shoot_sphere_regular(prob, Gamma, cfg);
  if (cfg.estimate_error) {
    const RadialProfile fine = shoot_sphere_regular(prob, Gamma, cfg.tightened(16.0));
    const bool south = *prof.first_zero > kPi / 2;
    const double d = south ? *prof.first_zero_complement - *fine.first_zero_complement
                           : *prof.first_zero - *fine.first_zero;
    prof.error_estimate = 2.0 * std::abs(d) +
                          4.0 * std::numeric_limits<double>::epsilon() * *prof.first_zero;
  }
  return prof;
}

RadialProfile integrate_sphere_linear(int N, double lambda, const IntegratorConfig& cfg) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidArgument("lambda must be positive");
  ShootOptions opts;
  opts.require_zero = false;
  return shoot_sphere_regular({N, 1.0, lambda}, 1.0, cfg, opts);
}

RadialProfile integrate_flat_regular(const Params& params, double gamma_bar, double rho_max,
                                     const IntegratorConfig& cfg) {
  params.validate();
  cfg.validate();
  if (!(gamma_bar > 0.0) || !std::isfinite(gamma_bar))
    throw InvalidArgument("gamma_bar must be positive");
  const double p = params.p;
  const double nm1 = params.N - 1.0;
  const double rho0 = cfg.theta_start * std::min(1.0, std::pow(gamma_bar, -(p - 1.0) / 2.0));
  if (!(rho_max > rho0)) throw InvalidArgument("rho_max must exceed the start offset");

  const double f0 = std::pow(gamma_bar, p);
  const double u0 = gamma_bar - f0 * rho0 * rho0 / (2.0 * params.N);
  const double v0 = -f0 * rho0 / params.N;

  RadialProfile prof;
  prof.kind = ProfileKind::RhoFlat;
  prof.push_node(rho0, u0, v0);
  auto rhs = [=](double x, const ode::State<2>& y, ode::State<2>& dy) {
    dy[0] = y[1];
    dy[1] = -nm1 / x * y[1] - std::pow(std::abs(y[0]), p - 1.0) * y[0];
  };
  auto observer = [&](const ode::DenseSegment<2>& seg, const ode::State<2>& yn) {
    prof.push_segment({seg, Chart::North}, seg.x1());
    if (crossed(seg.c[0][0], yn[0])) {
      const double xz = ode::locate_root(seg, 0, seg.x0, seg.x1());
      prof.first_zero = xz;
      prof.end_derivative = seg.eval(1, xz);
      prof.push_node(xz, seg.eval(0, xz), prof.end_derivative);
      return false;
    }
    prof.push_node(seg.x1(), yn[0], yn[1]);
    return true;
  };
  const auto res = ode::integrate<2>(rhs, rho0, ode::State<2>{u0, v0}, rho_max,
                                     ode_options(cfg, rho0 * 1e-2), observer, ode::LocalScale{});
  check_status(res, "flat shoot");
  prof.steps = res.accepted;
  if (prof.first_zero) prof.error_estimate = heuristic_error(prof, cfg, *prof.first_zero);
  return prof;
}

FlatSingularValue flat_singular(const Params& params, double rho) {
  const Exponents e = compute_exponents(params);
  if (!e.a) throw InvalidArgument("flat singular solution needs p >= p_S");
  if (!(rho > 0.0)) throw InvalidArgument("rho must be positive");
  const double mu = e.mu;
  const double v = *e.a * std::pow(rho, -mu);
  return {v, -mu * v / rho, mu * (mu + 1.0) * v / (rho * rho)};
}

double flat_singular_residual(const Params& params, double rho) {
  const FlatSingularValue s = flat_singular(params, rho);
  const double t1 = s.d2;
  const double t2 = (params.N - 1.0) * s.d1 / rho;
  const double t3 = std::pow(s.value, params.p);
  const double big = std::max({std::abs(t1), std::abs(t2), std::abs(t3)});
  return std::abs(t1 + t2 + t3) / big;
}

VariationalResult integrate_variational_stereographic(const Params& params, double Gamma,
                                                      const IntegratorConfig& cfg) {
  params.validate();
  cfg.validate();
  if (!(Gamma > 0.0) || !std::isfinite(Gamma)) throw InvalidArgument("Gamma must be positive");
  const Exponents e = compute_exponents(params);
  const int N = params.N;
  const double p = params.p;
  const double q = e.q;
  const double nm1 = N - 1.0;
  const double nn4 = N * (N - 2.0) / 4.0;
  const double gamma = std::pow(2.0, (N - 2.0) / 2.0) * Gamma;

  // Second-order series start; A(0) = 2.
  const double two_q = std::pow(2.0, -q);
  const double cu = N * (N - 2.0) * gamma + two_q * std::pow(gamma, p);
  const double cw = N * (N - 2.0) + p * two_q * std::pow(gamma, p - 1.0);
  const double r0 = cfg.theta_start * std::min(1.0, 1.0 / std::sqrt(cw));
  const ode::State<4> y0{gamma - cu * r0 * r0 / (2.0 * N), -cu * r0 / N,
                         1.0 - cw * r0 * r0 / (2.0 * N), -cw * r0 / N};

  auto rhs = [=](double r, const ode::State<4>& y, ode::State<4>& dy) {
    const double A = 2.0 / (1.0 + r * r);
    const double lin = nn4 * A * A;
    const double Aq = std::exp(q * std::log1p(r * r) - q * std::numbers::ln2);  // A^(-q)
    const double up = std::pow(std::abs(y[0]), p - 1.0);
    dy[0] = y[1];
    dy[1] = -nm1 / r * y[1] - lin * y[0] - Aq * up * y[0];
    dy[2] = y[3];
    dy[3] = -nm1 / r * y[3] - lin * y[2] - p * Aq * up * y[2];
  };

  VariationalResult out;
  auto& up = out.u_profile;
  auto& wp = out.w_profile;
  up.kind = wp.kind = ProfileKind::RStereographic;
  up.push_node(r0, y0[0], y0[1]);
  wp.push_node(r0, y0[2], y0[3]);

  const double k = N - 2.0;
  // Maps a state of the inverted chart at s back to (u, u_r, w, w_r) at r = 1/s.
  auto to_r = [k](double s, const ode::State<4>& v) {
    const double sk = std::pow(s, k), sk1 = sk * s;
    return ode::State<4>{sk * v[0], -sk1 * (k * v[0] + s * v[1]), sk * v[2],
                         -sk1 * (k * v[2] + s * v[3])};
  };
  bool inverted = false;
  bool done = false;
  auto observer = [&](const ode::DenseSegment<4>& seg, const ode::State<4>& yn) {
    const Chart chart = inverted ? Chart::Inverted : Chart::North;
    const double upper = inverted ? 1.0 / seg.x1() : seg.x1();
    up.push_segment({component_pair(seg, 0), chart, inverted ? k : 0.0}, upper);
    wp.push_segment({component_pair(seg, 2), chart, inverted ? k : 0.0}, upper);
    if (crossed(seg.c[0][0], yn[0])) {
      const double xz = ode::locate_root(seg, 0, seg.x0, seg.x1());
      const auto yz = inverted ? to_r(xz, seg.eval(xz)) : seg.eval(xz);
      const double R = inverted ? 1.0 / xz : xz;
      up.first_zero = R;
      up.end_derivative = yz[1];
      up.push_node(R, yz[0], yz[1]);
      wp.push_node(R, yz[2], yz[3]);
      out.w_at_zero = yz[2];
      done = true;
      return false;
    }
    const auto yr = inverted ? to_r(seg.x1(), yn) : yn;
    const double r = inverted ? 1.0 / seg.x1() : seg.x1();
    up.push_node(r, yr[0], yr[1]);
    wp.push_node(r, yr[2], yr[3]);
    return true;
  };
  const auto res = ode::integrate<4>(rhs, r0, y0, 1.0, ode_options(cfg, r0 * 1e-2), observer,
                                     ode::LocalScale{});
  check_status(res, "variational shoot");
  up.steps = res.accepted;
  if (!done) {
    // At r = s = 1 the inverted state is (u, -(k u + u_r)) for both pairs.
    const auto& y = res.y;
    const ode::State<4> ys{y[0], -(k * y[0] + y[1]), y[2], -(k * y[2] + y[3])};
    inverted = true;
    const auto res2 = ode::integrate<4>(rhs, 1.0, ys, kSouthPoleFloor, ode_options(cfg, 1e-3),
                                        observer, ode::LocalScale{});
    check_status(res2, "variational shoot (inverted chart)");
    up.steps += res2.accepted;
  }
  if (!up.first_zero) throw NumericalFailure("variational shoot found no zero of u");
  wp.steps = up.steps;
  up.error_estimate = heuristic_error(up, cfg, *up.first_zero);
  return out;
}

VariationalResult integrate_variational(const Params& params, double Gamma,
                                        const IntegratorConfig& cfg) {
  params.validate();
  const SphereVariation sv = shoot_sphere_variational({params.N, params.p, 1.0}, Gamma, cfg);
  // u = A^k U and w = du/dgamma = (A/2)^k W: the sphere-to-plane map is linear
  // in U, so w is the transform of W scaled by 2^(-k).
  const double k = (params.N - 2.0) / 2.0;
  const double s = std::pow(2.0, -k);
  VariationalResult out;
  out.u_profile = stereographic_u_from_U(sv.U, params.N);
  RadialProfile W = sv.W;
  W.first_zero = sv.U.first_zero;
  W.first_zero_complement = sv.U.first_zero_complement;
  out.w_profile = stereographic_u_from_U(W, params.N);
  out.w_profile.first_zero.reset();
  for (double& v : out.w_profile.value) v *= s;
  for (double& v : out.w_profile.derivative) v *= s;
  const double A = 2.0 * std::pow(std::sin(*sv.U.first_zero_complement / 2.0), 2.0);
  out.w_at_zero = s * std::pow(A, k) * sv.W_at_zero;
  return out;
}

}  // namespace efcap
