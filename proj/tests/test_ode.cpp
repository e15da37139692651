#include <cmath>
#include <numbers>

#include "doctest.h"
#include "efcap/ode.hpp"

using namespace efcap::ode;

namespace {

auto oscillator = [](double, const State<2>& y, State<2>& dy) {
  dy[0] = y[1];
  dy[1] = -y[0];
};

}  // namespace

TEST_CASE("harmonic oscillator is integrated to tolerance") {
  Options o;
  o.rel_tol = 1e-11;
  o.abs_tol = 1e-13;
  const auto res = integrate<2>(oscillator, 0.0, State<2>{1.0, 0.0}, 10.0, o,
                                [](const DenseSegment<2>&, const State<2>&) { return true; });
  CHECK(res.status == Status::Reached);
  CHECK(res.x == 10.0);
  CHECK(std::abs(res.y[0] - std::cos(10.0)) < 1e-9);
  CHECK(std::abs(res.y[1] + std::sin(10.0)) < 1e-9);
}

TEST_CASE("backward integration returns to the start") {
  Options o;
  o.rel_tol = 1e-12;
  o.abs_tol = 1e-14;
  const auto fwd = integrate<2>(oscillator, 0.0, State<2>{0.3, -0.7}, 5.0, o,
                                [](const DenseSegment<2>&, const State<2>&) { return true; });
  const auto back = integrate<2>(oscillator, 5.0, fwd.y, 0.0, o,
                                 [](const DenseSegment<2>&, const State<2>&) { return true; });
  CHECK(back.x == 0.0);
  CHECK(std::abs(back.y[0] - 0.3) < 1e-10);
  CHECK(std::abs(back.y[1] + 0.7) < 1e-10);
}

TEST_CASE("dense output interpolates and locates the zero of sin") {
  Options o;
  o.rel_tol = 1e-12;
  o.abs_tol = 1e-14;
  double max_err = 0.0;
  double root = -1.0;
  integrate<2>(oscillator, 0.0, State<2>{0.0, 1.0}, 4.0, o,
               [&](const DenseSegment<2>& seg, const State<2>& y) {
                 for (int k = 1; k < 4; ++k) {
                   const double x = seg.x0 + seg.h * k / 4.0;
                   max_err = std::max(max_err, std::abs(seg.eval(0, x) - std::sin(x)));
                 }
                 if (seg.c[0][0] > 0.0 && y[0] <= 0.0) root = locate_root(seg, 0, seg.x0, seg.x1());
                 return true;
               });
  CHECK(max_err < 1e-9);
  CHECK(std::abs(root - std::numbers::pi) < 1e-10);
}

TEST_CASE("observer can stop the integration") {
  int calls = 0;
  const auto res = integrate<2>(oscillator, 0.0, State<2>{1.0, 0.0}, 100.0, Options{},
                                [&](const DenseSegment<2>&, const State<2>&) { return ++calls < 3; });
  CHECK(res.status == Status::Stopped);
  CHECK(calls == 3);
  CHECK(res.accepted == 3);
}

TEST_CASE("step budget is enforced") {
  Options o;
  o.max_steps = 5;
  const auto res = integrate<2>(oscillator, 0.0, State<2>{1.0, 0.0}, 1e4, o,
                                [](const DenseSegment<2>&, const State<2>&) { return true; });
  CHECK(res.status == Status::MaxSteps);
}

TEST_CASE("local scale uses the slope over the chart distance") {
  Options o;
  o.rel_tol = 1e-10;
  o.abs_tol = 1e-12;
  State<2> sc{};
  const State<2> y{0.0, 5.0};
  const State<2> dy{5.0, 1e-3};
  LocalScale{1.0}(0.5, y, y, dy, o, sc);
  CHECK(sc[0] == doctest::Approx(1e-12 * 2.5).epsilon(1e-10));
  CHECK(sc[1] == doctest::Approx(1e-12 * 5.0 + 1e-10 * 5.0).epsilon(1e-10));
}
