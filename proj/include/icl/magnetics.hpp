// Quasi-static inductance extraction for coil paths.
//
// Mutual inductance comes from the Neumann double line integral
//
//   M = (mu0 / 4 pi) sum_i sum_j (dl_i . dl_j) / |r_i - r_j|
//
// evaluated with Gauss-Legendre quadrature over sub-elements of bounded
// length.  Self-inductance adds the closed-form straight-filament term for
// each segment (external inductance, geometric-mean-distance form) to the
// Neumann sum over distinct segment pairs.  Valid well below self-resonance;
// coil dimensions here are far smaller than a wavelength at the simulated
// bandwidths.
#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "icl/geometry.hpp"
#include "icl/network.hpp"

namespace icl {

struct QuadratureOptions {
  double max_subelement_um = 5.0;  // segment subdivision bound
  int gauss_points = 4;            // per sub-element, per path
};

// Neumann mutual inductance in henries.  Symmetric in its arguments down to
// the last bit: the two paths are put in a canonical order before summation.
// Throws SingularityError when quadrature points approach closer than the
// wire radius.
double mutual_inductance(const SegmentPath& a, const SegmentPath& b,
                         const QuadratureOptions& opts = {});

// Self-inductance in henries: Neumann over distinct segment pairs plus the
// per-segment straight-wire term at geometric mean distance trace_radius.
double self_inductance(const SegmentPath& a, double trace_radius_um,
                       const QuadratureOptions& opts = {});

// Maxwell's formula for coaxial circular loops (complete elliptic integrals
// via the arithmetic-geometric mean).  Analytic verification oracle for
// mutual_inductance; shares no code with the Neumann path.
double coaxial_loop_mutual(double r1_um, double r2_um, double d_um);

// One coil of the lumped model: geometry plus placement.
struct CoilSpec {
  CoilGeometry geometry;
  CoilPlacement placement;
};

struct NetworkBuildOptions {
  std::optional<double> resistance_per_coil_ohm;  // overrides sheet estimate
  double resistance_per_um_ohm = 0.02;            // trace-length estimate
  std::optional<double> shunt_c_f;
  QuadratureOptions quadrature;
};

// Assembles the lumped coupling network for a set of coils: L from
// self_inductance, M from mutual_inductance, series R from the total trace
// length unless given explicitly.  Validates the result (throws ModelError
// on a non-passive matrix).
CouplingNetwork build_network(const std::vector<CoilSpec>& coils,
                              const NetworkBuildOptions& opts = {});

}  // namespace icl
