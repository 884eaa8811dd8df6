#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "icl/geometry.hpp"
#include "icl/magnetics.hpp"

using namespace icl;

namespace {

constexpr double kMu0 = 4e-7 * 3.14159265358979323846;

SegmentPath square_loop(double side_um, double radius_um) {
  SegmentPath path;
  path.wire_radius_um = radius_um;
  path.points = {{0, 0, 0},
                 {side_um, 0, 0},
                 {side_um, side_um, 0},
                 {0, side_um, 0},
                 {0, 0, 0}};
  return path;
}

// Published closed form for a square loop of side l and wire radius a.
double square_loop_closed_form(double side_um, double radius_um) {
  const double l = side_um * 1e-6, a = radius_um * 1e-6;
  return (2.0 * kMu0 * l / 3.14159265358979323846) *
         (std::log(l / a) + a / l - 0.774);
}

}  // namespace

TEST_CASE("spiral path construction") {
  CoilGeometry one_turn{100.0, 1, 1.0, 1.0, 1.0};
  SegmentPath square = spiral_path(one_turn, {});
  CHECK(square.segment_count() == 4);
  // degenerate spiral: four sides of roughly the outer square
  CHECK((square.points[1] - square.points[0]).norm() == doctest::Approx(100));
  CHECK((square.points[2] - square.points[1]).norm() == doctest::Approx(100));
  CHECK((square.points[3] - square.points[2]).norm() == doctest::Approx(98));

  CoilGeometry table1;  // 250 um, 5 turns, w = s = 1 um
  SegmentPath spiral = spiral_path(table1, {});
  CHECK(spiral.segment_count() == 20);  // 4 per turn
  // innermost side shrinks by one pitch per half turn: 250 - 9 * 2 = 232
  const double innermost =
      (spiral.points[20] - spiral.points[19]).norm();
  CHECK(innermost == doctest::Approx(232.0));
  // length bookkeeping oracle: sides pair up, shrinking by the pitch
  double expected = 0;
  for (int k = 0; k < 20; ++k) expected += 250.0 - 2.0 * (k / 2);
  CHECK(spiral.total_length_um() == doctest::Approx(expected));
  CHECK(expected == doctest::Approx(4820.0));

  // placement offsets move the whole path
  CoilPlacement shifted{5.0, -3.0, 106.0};
  SegmentPath moved = spiral_path(table1, shifted);
  CHECK(moved.points[0].z() == doctest::Approx(106.0));
  CHECK((moved.points[0] - spiral.points[0]).head<2>().norm() ==
        doctest::Approx(std::hypot(5.0, 3.0)));
}

TEST_CASE("spiral geometry validation") {
  CoilGeometry bad;
  bad.turns = 70;  // 70 * 2 um = 140 um >= 125 um
  CHECK_THROWS_AS(spiral_path(bad, {}), GeometryError);
  bad = CoilGeometry{};
  bad.trace_width_um = -1;
  CHECK_THROWS_AS(spiral_path(bad, {}), GeometryError);
  CoilPlacement below;
  below.dz_um = -5;
  CHECK_THROWS_AS(below.validate(), GeometryError);
}

TEST_CASE("square loop self-inductance vs closed form") {
  const double computed = self_inductance(square_loop(100, 1), 1.0);
  const double closed = square_loop_closed_form(100, 1);
  CHECK(std::abs(computed - closed) / closed < 0.05);

  // dimensional scaling: doubling lengths at fixed a/l doubles L
  const double doubled = self_inductance(square_loop(200, 2), 2.0);
  CHECK(doubled / computed == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("multi-turn self-inductance trends") {
  CoilGeometry table1;
  CoilGeometry single = table1;
  single.turns = 1;
  const double l5 =
      self_inductance(spiral_path(table1, {}), table1.wire_radius_um());
  const double l1 =
      self_inductance(spiral_path(single, {}), single.wire_radius_um());
  CHECK(l5 > 0);
  CHECK(l5 > l1);
  CHECK(l5 > 10 * l1);  // n^2-ish growth for 5 turns
}

TEST_CASE("coaxial loops: Neumann vs Maxwell oracle") {
  SegmentPath lo = polygon_loop(125, 720, {0, 0, 0});
  SegmentPath hi = polygon_loop(125, 720, {0, 0, 106});
  const double neumann = mutual_inductance(lo, hi);
  const double maxwell = coaxial_loop_mutual(125, 125, 106);
  CHECK(std::abs(neumann - maxwell) / maxwell < 0.01);
}

TEST_CASE("mutual inductance symmetry is exact") {
  CoilGeometry geom;
  SegmentPath a = spiral_path(geom, {});
  SegmentPath b = spiral_path(geom, {30, -12, 106});
  CHECK(mutual_inductance(a, b) == mutual_inductance(b, a));  // bitwise

  SegmentPath c = polygon_loop(80, 64, {5, 5, 40});
  CHECK(mutual_inductance(a, c) == mutual_inductance(c, a));
}

TEST_CASE("lateral decay of the stacked pair") {
  CoilGeometry geom;
  SegmentPath base = spiral_path(geom, {});
  double prev = 1e9;
  for (double dx : {0.0, 10.0, 20.0, 40.0, 60.0}) {
    const double m =
        mutual_inductance(base, spiral_path(geom, {dx, 0.0, 106.0}));
    CHECK(std::abs(m) < prev);
    prev = std::abs(m);
  }
}

TEST_CASE("maxwell formula properties") {
  // dipole limit at d = 20 r
  const double r = 50;
  const double far = coaxial_loop_mutual(r, r, 20 * r);
  const double rm = r * 1e-6, dm = 20 * r * 1e-6;
  const double dipole =
      kMu0 * 3.14159265358979323846 * rm * rm * rm * rm / (2 * dm * dm * dm);
  CHECK(std::abs(far - dipole) / dipole < 0.01);

  // monotone in separation
  double prev = 1e9;
  for (double d : {50.0, 100.0, 200.0, 400.0}) {
    const double m = coaxial_loop_mutual(125, 125, d);
    CHECK(m < prev);
    CHECK(m > 0);
    prev = m;
  }

  // symmetric in radii
  CHECK(coaxial_loop_mutual(100, 60, 80) == coaxial_loop_mutual(60, 100, 80));

  CHECK_THROWS_AS(coaxial_loop_mutual(0, 10, 10), GeometryError);
  CHECK_THROWS_AS(coaxial_loop_mutual(10, 10, 0), GeometryError);
}

TEST_CASE("quadrature convergence") {
  CoilGeometry geom;
  SegmentPath a = spiral_path(geom, {});
  SegmentPath b = spiral_path(geom, {0, 0, 106});

  QuadratureOptions fine;
  fine.max_subelement_um = 2.5;  // double the sub-element count
  const double m0 = mutual_inductance(a, b);
  const double m1 = mutual_inductance(a, b, fine);
  CHECK(std::abs(m1 - m0) / std::abs(m0) < 1e-3);

  const double l0 = self_inductance(a, geom.wire_radius_um());
  const double l1 = self_inductance(a, geom.wire_radius_um(), fine);
  CHECK(std::abs(l1 - l0) / l0 < 1e-3);
}

TEST_CASE("touching paths raise SingularityError") {
  SegmentPath a, b;
  a.wire_radius_um = b.wire_radius_um = 1.0;
  a.points = {{0, 0, 0}, {100, 0, 0}};
  b.points = {{0, 0.2, 0}, {100, 0.2, 0}};  // 0.2 um apart, radius 1 um
  CHECK_THROWS_AS(mutual_inductance(a, b), SingularityError);
  CHECK_THROWS_AS(self_inductance(square_loop(100, 1), -1), GeometryError);
}

TEST_CASE("build_network") {
  CoilGeometry geom;

  // one coil
  CouplingNetwork solo = build_network({{geom, {}}});
  CHECK(solo.size() == 1);
  CHECK(solo.inductance_h(0) > 0);
  CHECK(solo.resistance_ohm(0) == doctest::Approx(0.02 * 4820.0));

  // stacked pair
  CouplingNetwork pair = build_network({{geom, {}}, {geom, {0, 0, 106}}});
  CHECK(pair.size() == 2);
  const double k = pair.coupling(0, 1);
  CHECK(k > 0);
  CHECK(k < 1);

  // 2-link stack (the shipped 2x2 array): 4x4, symmetric, positive definite
  std::vector<CoilSpec> coils;
  for (int link = 0; link < 2; ++link)
    for (int layer = 0; layer < 2; ++layer)
      coils.push_back(
          {geom, {link * 10.0, 0.0, (2 * link + layer) * 106.0}});
  CouplingNetwork quad = build_network(coils);
  CHECK(quad.size() == 4);
  CHECK((quad.mutual_h - quad.mutual_h.transpose()).cwiseAbs().maxCoeff() ==
        0.0);
  int distinct_terms = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (quad.mutual_h(i, j) != 0) ++distinct_terms;
  CHECK(distinct_terms == 6);
  CHECK_NOTHROW(quad.validate());

  // duplicate placements rejected
  CHECK_THROWS_AS(build_network({{geom, {}}, {geom, {}}}), GeometryError);

  // explicit resistance override
  NetworkBuildOptions opts;
  opts.resistance_per_coil_ohm = 7.5;
  CouplingNetwork custom = build_network({{geom, {}}}, opts);
  CHECK(custom.resistance_ohm(0) == 7.5);
}

TEST_CASE("netlist table format") {
  CoilGeometry geom;
  CouplingNetwork pair = build_network({{geom, {}}, {geom, {0, 0, 106}}});
  const std::string table = netlist_table(pair);
  CHECK(table.find("# coil R_ohm L_h") == 0);
  CHECK(table.find("# i j M_h") != std::string::npos);
  CHECK(table.find("0 1 ") != std::string::npos);
}
