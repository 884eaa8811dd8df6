#include "icl/magnetics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace icl {

namespace {

constexpr double kMu0OverFourPi = 1e-7;  // H/m
constexpr double kPi = std::numbers::pi;

// Gauss-Legendre rule mapped to [0, 1] with weights summing to 1.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton iteration on P_n from the Chebyshev initial guess.
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = (x + 1.0) / 2.0;
    rule.weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

// Straight sub-element with quadrature points baked in.
struct SubElement {
  Eigen::Vector3d dir;  // unit direction
  double length_um;
  std::size_t segment;  // parent segment in the source path
  std::vector<Eigen::Vector3d> gauss_points;
};

std::vector<SubElement> discretize(const SegmentPath& path,
                                   const QuadratureOptions& opts,
                                   const GaussRule& rule) {
  std::vector<SubElement> subs;
  for (std::size_t s = 0; s + 1 < path.points.size(); ++s) {
    const Eigen::Vector3d& p0 = path.points[s];
    const Eigen::Vector3d delta = path.points[s + 1] - p0;
    const double len = delta.norm();
    if (len <= 0) continue;
    const Eigen::Vector3d dir = delta / len;
    const int pieces =
        std::max(1, static_cast<int>(std::ceil(len / opts.max_subelement_um)));
    const double piece_len = len / pieces;
    for (int k = 0; k < pieces; ++k) {
      SubElement sub;
      sub.dir = dir;
      sub.length_um = piece_len;
      sub.segment = s;
      sub.gauss_points.reserve(rule.nodes.size());
      const Eigen::Vector3d start = p0 + (k * piece_len) * dir;
      for (double node : rule.nodes)
        sub.gauss_points.push_back(start + (node * piece_len) * dir);
      subs.push_back(std::move(sub));
    }
  }
  return subs;
}

// Lexicographic path order; makes the double sum independent of argument
// order down to the last bit.
bool path_precedes(const SegmentPath& a, const SegmentPath& b) {
  if (a.points.size() != b.points.size())
    return a.points.size() < b.points.size();
  for (std::size_t i = 0; i < a.points.size(); ++i)
    for (int c = 0; c < 3; ++c) {
      if (a.points[i][c] < b.points[i][c]) return true;
      if (a.points[i][c] > b.points[i][c]) return false;
    }
  return false;
}

// Neumann kernel integrated over one sub-element pair (dimensionless sum of
// w_i w_j / r with r in um; caller applies dir dot and lengths).
double kernel_sum(const SubElement& u, const SubElement& v,
                  const GaussRule& rule, double min_r_um) {
  double acc = 0;
  const std::size_t g = rule.nodes.size();
  for (std::size_t i = 0; i < g; ++i) {
    for (std::size_t j = 0; j < g; ++j) {
      const double r = (u.gauss_points[i] - v.gauss_points[j]).norm();
      if (r < min_r_um)
        throw SingularityError(
            "current paths touch: quadrature points only " +
            std::to_string(r) + " um apart (wire radius " +
            std::to_string(min_r_um) + " um)");
      acc += rule.weights[i] * rule.weights[j] / r;
    }
  }
  return acc;
}

// Cross sum over sub-element pairs.  In self mode only pairs from distinct
// parent segments count (each segment's own contribution comes from the
// closed-form straight-wire term) and the i<j half is doubled.
double neumann_sum(const std::vector<SubElement>& subs_a,
                   const std::vector<SubElement>& subs_b, const GaussRule& rule,
                   double min_r_um, bool self_mode) {
  double total_um = 0;
  const std::size_t nb = subs_b.size();
  for (std::size_t i = 0; i < subs_a.size(); ++i) {
    const std::size_t j_begin = self_mode ? i + 1 : 0;
    for (std::size_t j = j_begin; j < nb; ++j) {
      const SubElement& u = subs_a[i];
      const SubElement& v = subs_b[j];
      if (self_mode && u.segment == v.segment) continue;
      const double dot = u.dir.dot(v.dir);
      if (dot == 0) continue;  // perpendicular: kernel vanishes exactly
      total_um +=
          dot * u.length_um * v.length_um * kernel_sum(u, v, rule, min_r_um);
    }
  }
  return self_mode ? 2.0 * total_um : total_um;
}

// External self-inductance of a straight round wire, geometric mean
// distance a (henries; inputs in um).
double straight_wire_self_h(double len_um, double radius_um) {
  const double ratio = radius_um / len_um;
  const double bracket =
      std::log((len_um + std::hypot(len_um, radius_um)) / radius_um) -
      std::hypot(1.0, ratio) + ratio;
  return 2e-7 * (len_um * 1e-6) * bracket;
}

}  // namespace

double mutual_inductance(const SegmentPath& a, const SegmentPath& b,
                         const QuadratureOptions& opts) {
  const SegmentPath* first = &a;
  const SegmentPath* second = &b;
  if (path_precedes(*second, *first)) std::swap(first, second);

  const GaussRule rule = gauss_rule(opts.gauss_points);
  const auto subs_a = discretize(*first, opts, rule);
  const auto subs_b = discretize(*second, opts, rule);
  const double min_r =
      std::max({first->wire_radius_um, second->wire_radius_um, 1e-9});
  const double sum_um = neumann_sum(subs_a, subs_b, rule, min_r, false);
  return kMu0OverFourPi * sum_um * 1e-6;
}

double self_inductance(const SegmentPath& a, double trace_radius_um,
                       const QuadratureOptions& opts) {
  if (trace_radius_um <= 0)
    throw GeometryError("trace radius must be positive");
  const GaussRule rule = gauss_rule(opts.gauss_points);
  const auto subs = discretize(a, opts, rule);
  const double mutual_um =
      neumann_sum(subs, subs, rule, trace_radius_um, true);
  double total = kMu0OverFourPi * mutual_um * 1e-6;
  for (std::size_t s = 0; s + 1 < a.points.size(); ++s) {
    const double len = (a.points[s + 1] - a.points[s]).norm();
    if (len > 0) total += straight_wire_self_h(len, trace_radius_um);
  }
  return total;
}

double coaxial_loop_mutual(double r1_um, double r2_um, double d_um) {
  if (r1_um <= 0 || r2_um <= 0 || d_um <= 0)
    throw GeometryError("coaxial loops need r1, r2, d > 0");
  const double r1 = r1_um * 1e-6, r2 = r2_um * 1e-6, d = d_um * 1e-6;
  const double k2 = 4.0 * r1 * r2 / ((r1 + r2) * (r1 + r2) + d * d);
  const double k = std::sqrt(k2);

  // Complete elliptic integrals by the arithmetic-geometric mean.
  double an = 1.0, bn = std::sqrt(1.0 - k2), cn = k;
  double c_sum = 0.5 * cn * cn;
  double pow2 = 0.5;
  while (cn > 1e-16) {
    const double a_next = 0.5 * (an + bn);
    const double b_next = std::sqrt(an * bn);
    cn = 0.5 * (an - bn);
    an = a_next;
    bn = b_next;
    pow2 *= 2.0;
    c_sum += pow2 * cn * cn;
  }
  const double kk = kPi / (2.0 * an);          // K(k)
  const double ee = kk * (1.0 - c_sum);        // E(k)

  constexpr double mu0 = 4e-7 * kPi;
  return mu0 * std::sqrt(r1 * r2) * ((2.0 / k - k) * kk - (2.0 / k) * ee);
}

CouplingNetwork build_network(const std::vector<CoilSpec>& coils,
                              const NetworkBuildOptions& opts) {
  if (coils.empty()) throw GeometryError("network needs at least one coil");
  for (std::size_t i = 0; i < coils.size(); ++i)
    for (std::size_t j = i + 1; j < coils.size(); ++j) {
      const CoilPlacement& p = coils[i].placement;
      const CoilPlacement& q = coils[j].placement;
      if (p.dx_um == q.dx_um && p.dy_um == q.dy_um && p.dz_um == q.dz_um)
        throw GeometryError("coils " + std::to_string(i) + " and " +
                            std::to_string(j) + " share a placement");
    }

  const Eigen::Index n = static_cast<Eigen::Index>(coils.size());
  std::vector<SegmentPath> paths;
  paths.reserve(coils.size());
  for (const CoilSpec& spec : coils) {
    spec.placement.validate();
    paths.push_back(spiral_path(spec.geometry, spec.placement));
  }

  CouplingNetwork net;
  net.resistance_ohm.resize(n);
  net.inductance_h.resize(n);
  net.mutual_h = Eigen::MatrixXd::Zero(n, n);
  net.shunt_c_f =
      Eigen::VectorXd::Constant(n, opts.shunt_c_f.value_or(0.0));

  for (Eigen::Index i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    net.inductance_h(i) = self_inductance(
        paths[idx], coils[idx].geometry.wire_radius_um(), opts.quadrature);
    net.resistance_ohm(i) =
        opts.resistance_per_coil_ohm.value_or(
            opts.resistance_per_um_ohm * paths[idx].total_length_um());
  }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double m =
          mutual_inductance(paths[static_cast<std::size_t>(i)],
                            paths[static_cast<std::size_t>(j)],
                            opts.quadrature);
      net.mutual_h(i, j) = m;
      net.mutual_h(j, i) = m;
    }

  net.validate();
  return net;
}

}  // namespace icl
