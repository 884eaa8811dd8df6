#include "icl/network.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>

namespace icl {

Eigen::MatrixXd CouplingNetwork::inductance_matrix() const {
  Eigen::MatrixXd full = mutual_h;
  full.diagonal() = inductance_h;
  return full;
}

double CouplingNetwork::coupling(Eigen::Index i, Eigen::Index j) const {
  return mutual_h(i, j) / std::sqrt(inductance_h(i) * inductance_h(j));
}

void CouplingNetwork::validate() const {
  const Eigen::Index n = size();
  if (n < 1) throw ModelError("network needs at least one coil");
  if (resistance_ohm.size() != n || mutual_h.rows() != n ||
      mutual_h.cols() != n || (shunt_c_f.size() != 0 && shunt_c_f.size() != n))
    throw ModelError("network field sizes disagree");
  if ((resistance_ohm.array() < 0).any())
    throw ModelError("negative series resistance");
  if ((inductance_h.array() <= 0).any())
    throw ModelError("non-positive self-inductance");
  if (shunt_c_f.size() != 0 && (shunt_c_f.array() < 0).any())
    throw ModelError("negative shunt capacitance");
  if (!mutual_h.isApprox(mutual_h.transpose(), 0))
    throw ModelError("mutual matrix not symmetric");
  if (mutual_h.diagonal().cwiseAbs().maxCoeff() != 0)
    throw ModelError("mutual matrix diagonal must be zero");
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (std::abs(coupling(i, j)) >= 1.0)
        throw ModelError("coupling coefficient |k| >= 1 between coils " +
                         std::to_string(i) + " and " + std::to_string(j));
  Eigen::LLT<Eigen::MatrixXd> llt(inductance_matrix());
  if (llt.info() != Eigen::Success)
    throw ModelError("inductance matrix not positive definite");
}

std::string CouplingNetwork::fingerprint() const {
  uint64_t hash = 1469598103934665603ull;
  auto mix = [&hash](const double* data, std::size_t count) {
    const unsigned char* bytes = reinterpret_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < count * sizeof(double); ++i) {
      hash ^= bytes[i];
      hash *= 1099511628211ull;
    }
  };
  mix(resistance_ohm.data(), resistance_ohm.size());
  mix(inductance_h.data(), inductance_h.size());
  mix(mutual_h.data(), static_cast<std::size_t>(mutual_h.size()));
  if (shunt_c_f.size()) mix(shunt_c_f.data(), shunt_c_f.size());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

std::string netlist_table(const CouplingNetwork& net) {
  std::string out = "# coil R_ohm L_h\n";
  char line[128];
  for (Eigen::Index i = 0; i < net.size(); ++i) {
    std::snprintf(line, sizeof line, "%lld %.17g %.17g\n",
                  static_cast<long long>(i), net.resistance_ohm(i),
                  net.inductance_h(i));
    out += line;
  }
  out += "# i j M_h\n";
  for (Eigen::Index i = 0; i < net.size(); ++i)
    for (Eigen::Index j = i + 1; j < net.size(); ++j) {
      std::snprintf(line, sizeof line, "%lld %lld %.17g\n",
                    static_cast<long long>(i), static_cast<long long>(j),
                    net.mutual_h(i, j));
      out += line;
    }
  return out;
}

}  // namespace icl
