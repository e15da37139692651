#include "efcap/profile.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace efcap {

std::string_view to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::ThetaOnSphere:
      return "theta_on_sphere";
    case ProfileKind::RStereographic:
      return "r_stereographic";
    case ProfileKind::RhoFlat:
      return "rho_flat";
  }
  return "unknown";
}

void RadialProfile::push_node(double x, double v, double dv, double comp) {
  grid.push_back(x);
  value.push_back(v);
  derivative.push_back(dv);
  if (kind == ProfileKind::ThetaOnSphere) complement.push_back(comp);
}

void RadialProfile::push_segment(const ChartSegment& s, double x_upper) {
  segments.push_back(s);
  segment_upper.push_back(x_upper);
}

namespace {

struct Hermite {
  double v, d;
};

Hermite hermite(const RadialProfile& p, double x) {
  const auto& g = p.grid;
  if (g.size() == 1) return {p.value[0], p.derivative[0]};
  auto it = std::upper_bound(g.begin(), g.end(), x);
  std::size_t i = it == g.begin() ? 0 : static_cast<std::size_t>(it - g.begin()) - 1;
  i = std::min(i, g.size() - 2);
  const double h = g[i + 1] - g[i];
  if (h <= 0.0) return {p.value[i], p.derivative[i]};
  const double s = (x - g[i]) / h;
  const double v0 = p.value[i], v1 = p.value[i + 1];
  const double d0 = p.derivative[i] * h, d1 = p.derivative[i + 1] * h;
  const double s2 = s * s, s3 = s2 * s;
  const double v = (2 * s3 - 3 * s2 + 1) * v0 + (s3 - 2 * s2 + s) * d0 + (-2 * s3 + 3 * s2) * v1 +
                   (s3 - s2) * d1;
  const double dv = ((6 * s2 - 6 * s) * v0 + (3 * s2 - 4 * s + 1) * d0 + (-6 * s2 + 6 * s) * v1 +
                     (3 * s2 - 2 * s) * d1) /
                    h;
  return {v, dv};
}

const ChartSegment& find_segment(const RadialProfile& p, double x) {
  auto it = std::lower_bound(p.segment_upper.begin(), p.segment_upper.end(), x);
  if (it == p.segment_upper.end()) --it;
  return p.segments[static_cast<std::size_t>(it - p.segment_upper.begin())];
}

}  // namespace

double RadialProfile::value_at(double x) const {
  if (segments.empty()) return hermite(*this, x).v;
  const auto& s = find_segment(*this, x);
  switch (s.chart) {
    case Chart::North:
      return s.seg.eval(0, x);
    case Chart::South:
      return s.seg.eval(0, std::numbers::pi - x);
    case Chart::Inverted:
      break;
  }
  const double si = 1.0 / x;
  return std::pow(si, s.weight) * s.seg.eval(0, si);
}

double RadialProfile::derivative_at(double x) const {
  if (segments.empty()) return hermite(*this, x).d;
  const auto& s = find_segment(*this, x);
  switch (s.chart) {
    case Chart::North:
      return s.seg.eval(1, x);
    case Chart::South:
      return -s.seg.eval(1, std::numbers::pi - x);
    case Chart::Inverted:
      break;
  }
  // u = s^k v(s) with s = 1/r gives du/dr = -s^(k+1) (k v + s v').
  const double si = 1.0 / x;
  const double k = s.weight;
  return -std::pow(si, k + 1.0) * (k * s.seg.eval(0, si) + si * s.seg.eval(1, si));
}

}  // namespace efcap
