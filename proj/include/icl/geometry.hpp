// Coil geometry: square spiral construction and discretized current paths.
// All lengths in micrometres.
#pragma once

#include <Eigen/Core>
#include <vector>

#include "icl/errors.hpp"

namespace icl {

// Square spiral described by the outer side length, turn count and trace
// cross-section.  The equivalent round-wire radius used for self-inductance
// is (trace_width + trace_thickness) / 4.
struct CoilGeometry {
  double outer_side_um = 250.0;
  int turns = 5;
  double trace_width_um = 1.0;
  double trace_spacing_um = 1.0;
  double trace_thickness_um = 1.0;

  double pitch_um() const { return trace_width_um + trace_spacing_um; }
  double wire_radius_um() const {
    return (trace_width_um + trace_thickness_um) / 4.0;
  }
  void validate() const;
};

// Absolute coil position (center offset and layer height).  Two coils of a
// network may not share a placement; pairwise overlap is checked where the
// pair is assembled.
struct CoilPlacement {
  double dx_um = 0.0;
  double dy_um = 0.0;
  double dz_um = 0.0;

  void validate() const;  // dz >= 0
};

// Open polyline of straight segments tracing a coil.  points holds n+1
// vertices for n segments; wire_radius_um feeds the near-touch singularity
// guard in the Neumann integrals.
struct SegmentPath {
  std::vector<Eigen::Vector3d> points;
  double wire_radius_um = 0.5;

  std::size_t segment_count() const {
    return points.empty() ? 0 : points.size() - 1;
  }
  double total_length_um() const;
};

// Inward rectangular spiral with `turns` turns, 4 segments per turn, sides
// shrinking by one pitch per half turn, centered on (dx, dy) in the z = dz
// plane.  Throws GeometryError when the spiral cannot fit.
SegmentPath spiral_path(const CoilGeometry& geom, const CoilPlacement& place);

// Regular n-gon approximation of a circular loop (closed polyline), used by
// the coaxial-loop verification tests.
SegmentPath polygon_loop(double radius_um, int sides,
                         const Eigen::Vector3d& center_um,
                         double wire_radius_um = 0.5);

}  // namespace icl
