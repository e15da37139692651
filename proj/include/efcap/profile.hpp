#ifndef EFCAP_PROFILE_HPP
#define EFCAP_PROFILE_HPP

#include <optional>
#include <string_view>
#include <vector>

#include "efcap/ode.hpp"

namespace efcap {

enum class ProfileKind { ThetaOnSphere, RStereographic, RhoFlat };

std::string_view to_string(ProfileKind kind);

/// Coordinate chart of a dense-output segment. Sphere profiles are integrated
/// in theta up to the equator and in phi = pi - theta beyond it, so that zeros
/// close to the south pole keep full relative precision. Stereographic
/// profiles use s = 1/r beyond r = 1, where the solution is stored as
/// s^(-weight) u.
enum class Chart { North, South, Inverted };

struct ChartSegment {
  ode::DenseSegment<2> seg;  // components: value, d(value)/d(chart variable)
  Chart chart = Chart::North;
  double weight = 0.0;  // Inverted only: u(r) = s^weight * seg(s), s = 1/r
};

/// A computed radial solution: nodes at every accepted step plus the dense
/// output that produced them.
struct RadialProfile {
  ProfileKind kind = ProfileKind::ThetaOnSphere;
  std::vector<double> grid;
  std::vector<double> value;
  std::vector<double> derivative;
  std::vector<double> complement;  // pi - theta per node (sphere profiles only)
  std::optional<double> first_zero;
  std::optional<double> first_zero_complement;  // pi - first_zero (sphere profiles only)
  double end_derivative = 0.0;
  double error_estimate = 0.0;
  long steps = 0;

  std::vector<ChartSegment> segments;
  std::vector<double> segment_upper;  // upper end of each segment in the profile variable

  bool empty() const { return grid.empty(); }
  double lower() const { return grid.front(); }
  double upper() const { return grid.back(); }

  /// Evaluation between nodes. Uses the dense output when present and cubic
  /// Hermite interpolation of the nodes otherwise.
  double value_at(double x) const;
  double derivative_at(double x) const;

  /// Appends a node; for sphere profiles `comp` is pi - x.
  void push_node(double x, double v, double dv, double comp = 0.0);
  /// Appends a dense segment whose upper end (in the profile variable) is `x_upper`.
  void push_segment(const ChartSegment& s, double x_upper);
};

}  // namespace efcap

#endif  // EFCAP_PROFILE_HPP
