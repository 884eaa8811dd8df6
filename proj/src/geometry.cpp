#include "icl/geometry.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace icl {

void CoilGeometry::validate() const {
  if (outer_side_um <= 0 || trace_width_um <= 0 || trace_spacing_um <= 0 ||
      trace_thickness_um <= 0)
    throw GeometryError("coil lengths must be positive");
  if (turns < 1) throw GeometryError("coil needs at least one turn");
  if (turns * pitch_um() >= outer_side_um / 2.0)
    throw GeometryError("spiral does not fit: turns * (width + spacing) = " +
                        std::to_string(turns * pitch_um()) +
                        " um exceeds half the outer side");
}

void CoilPlacement::validate() const {
  if (dz_um < 0) throw GeometryError("vertical separation must be >= 0");
}

double SegmentPath::total_length_um() const {
  double total = 0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i)
    total += (points[i + 1] - points[i]).norm();
  return total;
}

SegmentPath spiral_path(const CoilGeometry& geom, const CoilPlacement& place) {
  geom.validate();
  const double s = geom.outer_side_um;
  const double p = geom.pitch_um();
  const int n_segments = 4 * geom.turns;

  // Walk east, north, west, south; the side shrinks by one pitch every two
  // segments, which keeps adjacent parallel traces one pitch apart.
  SegmentPath path;
  path.wire_radius_um = geom.wire_radius_um();
  path.points.reserve(static_cast<std::size_t>(n_segments) + 1);

  const Eigen::Vector3d offset(place.dx_um - s / 2.0, place.dy_um - s / 2.0,
                               place.dz_um);
  Eigen::Vector3d cursor = Eigen::Vector3d::Zero();
  path.points.push_back(cursor + offset);

  static const Eigen::Vector3d kDirs[4] = {
      {1, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {0, -1, 0}};
  for (int k = 0; k < n_segments; ++k) {
    const double side = s - p * (k / 2);
    if (side <= 0) throw GeometryError("spiral collapsed before completing");
    cursor += side * kDirs[k % 4];
    path.points.push_back(cursor + offset);
  }
  return path;
}

SegmentPath polygon_loop(double radius_um, int sides,
                         const Eigen::Vector3d& center_um,
                         double wire_radius_um) {
  if (radius_um <= 0 || sides < 3)
    throw GeometryError("polygon loop needs radius > 0 and >= 3 sides");
  SegmentPath path;
  path.wire_radius_um = wire_radius_um;
  path.points.reserve(static_cast<std::size_t>(sides) + 1);
  for (int k = 0; k <= sides; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / sides;
    path.points.push_back(center_um +
                          Eigen::Vector3d(radius_um * std::cos(theta),
                                          radius_um * std::sin(theta), 0.0));
  }
  // close exactly
  path.points.back() = path.points.front();
  return path;
}

}  // namespace icl
