// Embedded Runge-Kutta integration with dense output.
//
// Dormand-Prince 5(4) pair (the coefficients of Hairer's DOPRI5) with
// proportional-integral step control and the fourth-order continuous
// extension. The integrator runs in either direction of the independent
// variable and reports every accepted step to an observer together with its
// dense-output segment, which is how callers detect events.

#ifndef EFCAP_ODE_HPP
#define EFCAP_ODE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

namespace efcap::ode {

template <std::size_t Dim>
using State = std::array<double, Dim>;

/// Continuous extension of one accepted step, valid on [x0, x0 + h].
template <std::size_t Dim>
struct DenseSegment {
  double x0 = 0.0;
  double h = 0.0;
  std::array<State<Dim>, 5> c{};

  double x1() const { return x0 + h; }

  double eval(std::size_t i, double x) const {
    const double s = (x - x0) / h;
    const double s1 = 1.0 - s;
    return c[0][i] + s * (c[1][i] + s1 * (c[2][i] + s * (c[3][i] + s1 * c[4][i])));
  }

  State<Dim> eval(double x) const {
    State<Dim> y{};
    for (std::size_t i = 0; i < Dim; ++i) y[i] = eval(i, x);
    return y;
  }
};

enum class Status { Reached, Stopped, MaxSteps, StepTooSmall };

template <std::size_t Dim>
struct Result {
  Status status = Status::Reached;
  double x = 0.0;
  State<Dim> y{};
  long accepted = 0;
  long rejected = 0;
  long rhs_calls = 0;
  double error_sum = 0.0;  // sum of scaled local error norms times rel_tol
};

struct Options {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double h_init = 0.0;  // magnitude of the first trial step; 0 selects |x_end - x0| * 1e-6
  double max_step = std::numeric_limits<double>::infinity();
  long max_steps = 2'000'000;
};

/// Standard mixed scale: abs_tol + rel_tol * max(|y_old|, |y_new|).
struct AbsRelScale {
  template <std::size_t Dim>
  void operator()(double, const State<Dim>& y0, const State<Dim>& y1, const State<Dim>&,
                  const Options& o, State<Dim>& sc) const {
    for (std::size_t i = 0; i < Dim; ++i)
      sc[i] = o.abs_tol + o.rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
  }
};

/// Scale tied to the local behaviour of each component: component i is
/// measured by max(|y_i|, l |y_i'|), with l the distance of x from the origin
/// of the chart (optionally capped). This is the size a component can reach
/// through its own growth over one natural length, so abs_tol acts relative
/// to it. Components passing through zero keep a meaningful scale, and tiny
/// but significant components are not swamped by large neighbours.
struct LocalScale {
  double cap = std::numeric_limits<double>::infinity();

  template <std::size_t Dim>
  void operator()(double x, const State<Dim>& y0, const State<Dim>& y1, const State<Dim>& dy0,
                  const Options& o, State<Dim>& sc) const {
    const double l = std::min(std::abs(x), cap);
    for (std::size_t i = 0; i < Dim; ++i) {
      const double v = std::max(std::abs(y0[i]), std::abs(y1[i]));
      sc[i] = o.abs_tol * std::max(v, l * std::abs(dy0[i])) + o.rel_tol * v +
              std::numeric_limits<double>::min();
    }
  }
};

namespace detail {
// Dormand-Prince 5(4) tableau.
inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                        a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                        a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
inline constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                        a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                        e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
}  // namespace detail

/// Integrates y' = rhs(x, y) from x0 towards x_end.
///
/// `observer(segment, y_new)` is called after every accepted step and returns
/// false to stop. `scale(x, y_old, y_new, dy_old, options, sc)` fills the
/// per-component error scale.
template <std::size_t Dim, class Rhs, class Observer, class Scale = AbsRelScale>
Result<Dim> integrate(Rhs&& rhs, double x0, const State<Dim>& y0, double x_end,
                      const Options& opt, Observer&& observer, Scale&& scale = Scale{}) {
  using namespace detail;
  Result<Dim> res;
  res.x = x0;
  res.y = y0;
  if (x_end == x0) return res;

  const double dir = x_end > x0 ? 1.0 : -1.0;
  const double span = std::abs(x_end - x0);
  double h = opt.h_init > 0.0 ? opt.h_init : span * 1e-6;
  h = std::min({h, span, opt.max_step});

  // PI controller parameters as in DOPRI5.
  constexpr double beta = 0.04;
  constexpr double expo1 = 0.2 - beta * 0.75;
  constexpr double safe = 0.9;
  constexpr double facc1 = 1.0 / 0.2;  // largest step shrink
  constexpr double facc2 = 1.0 / 10.0;  // largest step growth
  double facold = 1e-4;
  bool last_rejected = false;

  double x = x0;
  State<Dim> y = y0;
  State<Dim> k1, k2, k3, k4, k5, k6, k7, yt, y1, err, sc;
  rhs(x, y, k1);
  ++res.rhs_calls;

  DenseSegment<Dim> seg;
  while (true) {
    if (res.accepted + res.rejected >= opt.max_steps) {
      res.status = Status::MaxSteps;
      break;
    }
    const double remaining = std::abs(x_end - x);
    bool final_step = false;
    if (h >= remaining) {
      h = remaining;
      final_step = true;
    }
    if (h <= 8.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(x), 1e-300) ||
        h < std::numeric_limits<double>::denorm_min() * 16) {
      res.status = Status::StepTooSmall;
      break;
    }
    const double hs = dir * h;

    for (std::size_t i = 0; i < Dim; ++i) yt[i] = y[i] + hs * a21 * k1[i];
    rhs(x + c2 * hs, yt, k2);
    for (std::size_t i = 0; i < Dim; ++i) yt[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
    rhs(x + c3 * hs, yt, k3);
    for (std::size_t i = 0; i < Dim; ++i)
      yt[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(x + c4 * hs, yt, k4);
    for (std::size_t i = 0; i < Dim; ++i)
      yt[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs(x + c5 * hs, yt, k5);
    for (std::size_t i = 0; i < Dim; ++i)
      yt[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    const double xph = final_step ? x_end : x + hs;
    rhs(xph, yt, k6);
    for (std::size_t i = 0; i < Dim; ++i)
      y1[i] = y[i] + hs * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    rhs(xph, y1, k7);
    res.rhs_calls += 6;

    for (std::size_t i = 0; i < Dim; ++i)
      err[i] = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    scale(xph, y, y1, k1, opt, sc);
    double e2 = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < Dim; ++i) {
      const double r = err[i] / sc[i];
      e2 += r * r;
      finite = finite && std::isfinite(y1[i]);
    }
    double en = std::sqrt(e2 / static_cast<double>(Dim));
    if (!finite || !std::isfinite(en)) en = 1e10;

    const double fac11 = std::pow(std::max(en, 1e-300), expo1);
    if (en <= 1.0) {
      double fac = fac11 / std::pow(facold, beta);
      fac = std::clamp(fac / safe, facc2, facc1);
      double hnew = h / fac;
      facold = std::max(en, 1e-4);
      ++res.accepted;
      res.error_sum += en * opt.rel_tol;

      seg.x0 = x;
      seg.h = xph - x;
      for (std::size_t i = 0; i < Dim; ++i) {
        const double ydiff = y1[i] - y[i];
        const double bspl = hs * k1[i] - ydiff;
        seg.c[0][i] = y[i];
        seg.c[1][i] = ydiff;
        seg.c[2][i] = bspl;
        seg.c[3][i] = ydiff - hs * k7[i] - bspl;
        seg.c[4][i] = hs * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                            d7 * k7[i]);
      }
      k1 = k7;
      x = xph;
      y = y1;
      res.x = x;
      res.y = y;
      if (!observer(static_cast<const DenseSegment<Dim>&>(seg), static_cast<const State<Dim>&>(y))) {
        res.status = Status::Stopped;
        break;
      }
      if (final_step) {
        res.status = Status::Reached;
        break;
      }
      hnew = std::min(hnew, opt.max_step);
      if (last_rejected) hnew = std::min(hnew, h);
      last_rejected = false;
      h = hnew;
    } else {
      h = h / std::min(facc1, fac11 / safe);
      last_rejected = true;
      ++res.rejected;
    }
  }
  return res;
}

/// Bisection for a sign change of f on [x_lo, x_hi]. Returns the endpoint of
/// the final bracket with the smaller |f|.
template <class F>
double locate_root(F&& f, double x_lo, double x_hi) {
  double f_lo = f(x_lo);
  double f_hi = f(x_hi);
  if (f_lo == 0.0) return x_lo;
  if (f_hi == 0.0) return x_hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (x_lo + x_hi);
    if (mid == x_lo || mid == x_hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (f_lo > 0.0)) {
      x_lo = mid;
      f_lo = fm;
    } else {
      x_hi = mid;
      f_hi = fm;
    }
  }
  return std::abs(f_lo) <= std::abs(f_hi) ? x_lo : x_hi;
}

/// Sign change of component `i` of a dense segment, in the segment's own coordinate.
template <std::size_t Dim>
double locate_root(const DenseSegment<Dim>& seg, std::size_t i, double x_lo, double x_hi) {
  return locate_root([&](double x) { return seg.eval(i, x); }, x_lo, x_hi);
}

}  // namespace efcap::ode

#endif  // EFCAP_ODE_HPP
