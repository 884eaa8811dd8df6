// Touchstone v1 S-parameter ingest and lumped R/L/M extraction.
//
// Parsing accepts the classic option line "# <unit> S <RI|MA|DB> R <Z0>"
// with '!' comments; v2 files ([Version] etc.) are rejected.  Extraction
// converts S to Z = Z0 (I+S)(I-S)^-1 at one frequency and reads the series
// resistances and the inductance matrix off the impedance entries.
#pragma once

#include <Eigen/Core>
#include <complex>
#include <string>
#include <vector>

#include "icl/network.hpp"

namespace icl {

struct TouchstoneData {
  Eigen::VectorXd frequencies_hz;            // strictly ascending, > 0
  std::vector<Eigen::MatrixXcd> s_matrices;  // one N x N matrix per frequency
  double reference_impedance_ohm = 50.0;
  int port_count = 0;

  void validate() const;
};

// ports_hint = 0 infers the port count from the record structure (the .sNp
// extension is the usual source of the hint).  Throws ParseError on
// malformed input, OrderError on non-ascending frequencies.
TouchstoneData parse_touchstone(const std::string& text, int ports_hint = 0);

// Canonical RI/Hz form at 17 significant digits; parse_touchstone inverts it
// exactly.
std::string write_touchstone(const TouchstoneData& data);

// Lumped extraction at f_extract (linear interpolation of S between the
// bracketing sample points).  Throws SingularityError when (I - S) is
// singular, PassivityError when the extracted inductance matrix is not
// positive definite.
CouplingNetwork extract_network(const TouchstoneData& data,
                                double f_extract_hz);

struct ChannelDiagnostics {
  struct Entry {
    double frequency_hz;
    double max_asymmetry;      // max |S - S^T|
    double max_singular_value;
    bool reciprocal;
    bool passive;
  };
  std::vector<Entry> entries;
  double tolerance;
  bool all_reciprocal = true;
  bool all_passive = true;
};

ChannelDiagnostics check_reciprocity_passivity(const TouchstoneData& data,
                                               double tol);
std::string diagnostics_table(const ChannelDiagnostics& report);

// Forward model: exact S-parameters of a series R + jwL network with mutual
// coupling (the shunt-capacitance field is ignored).  Serves as the
// independent oracle for extract_network and as a fixture generator.
TouchstoneData scatter_from_network(const CouplingNetwork& net,
                                    const Eigen::VectorXd& frequencies_hz,
                                    double z0_ohm = 50.0);

}  // namespace icl
