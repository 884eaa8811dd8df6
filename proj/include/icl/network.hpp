// Lumped coupling model shared by the magnetics and S-parameter paths:
// per-coil series R and self-inductance L, symmetric mutual matrix M with a
// zero diagonal, optional shunt C at each coil's terminals.
#pragma once

#include <Eigen/Core>
#include <string>

#include "icl/errors.hpp"

namespace icl {

struct CouplingNetwork {
  Eigen::VectorXd resistance_ohm;   // per coil, >= 0
  Eigen::VectorXd inductance_h;     // per coil, > 0
  Eigen::MatrixXd mutual_h;         // symmetric, zero diagonal
  Eigen::VectorXd shunt_c_f;        // per coil, >= 0 (0 = absent)

  Eigen::Index size() const { return inductance_h.size(); }

  // Full inductance matrix: L on the diagonal, M off it.
  Eigen::MatrixXd inductance_matrix() const;

  // Coupling coefficient k_ij = M_ij / sqrt(L_i L_j).
  double coupling(Eigen::Index i, Eigen::Index j) const;

  // Throws ModelError unless the inductance matrix is symmetric positive
  // definite with |k| < 1, R >= 0 and L > 0.
  void validate() const;

  // Stable fingerprint over all numeric entries (FNV-1a of the raw bytes).
  std::string fingerprint() const;
};

// Plain-text netlist table: per-coil R and L rows, then one row per mutual
// entry (i, j, value).
std::string netlist_table(const CouplingNetwork& net);

}  // namespace icl
