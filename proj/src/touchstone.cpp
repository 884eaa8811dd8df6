#include "icl/touchstone.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace icl {

namespace {

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  return s;
}

double frequency_scale(const std::string& unit) {
  const std::string u = upper(unit);
  if (u == "HZ") return 1.0;
  if (u == "KHZ") return 1e3;
  if (u == "MHZ") return 1e6;
  if (u == "GHZ") return 1e9;
  throw ParseError("unknown frequency unit '" + unit + "'");
}

enum class NumberFormat { RI, MA, DB };

NumberFormat number_format(const std::string& fmt) {
  const std::string f = upper(fmt);
  if (f == "RI") return NumberFormat::RI;
  if (f == "MA") return NumberFormat::MA;
  if (f == "DB") return NumberFormat::DB;
  throw ParseError("unknown data format '" + fmt + "'");
}

std::complex<double> to_complex(NumberFormat fmt, double a, double b) {
  switch (fmt) {
    case NumberFormat::RI:
      return {a, b};
    case NumberFormat::MA:
      return std::polar(a, b * std::numbers::pi / 180.0);
    case NumberFormat::DB:
      return std::polar(std::pow(10.0, a / 20.0),
                        b * std::numbers::pi / 180.0);
  }
  return {};
}

}  // namespace

void TouchstoneData::validate() const {
  if (port_count < 1) throw ParseError("port count must be >= 1");
  if (frequencies_hz.size() == 0) throw ParseError("no frequency points");
  if (static_cast<std::size_t>(frequencies_hz.size()) != s_matrices.size())
    throw ParseError("frequency and matrix counts disagree");
  for (Eigen::Index i = 0; i < frequencies_hz.size(); ++i) {
    if (frequencies_hz(i) <= 0)
      throw OrderError("frequencies must be positive");
    if (i > 0 && frequencies_hz(i) <= frequencies_hz(i - 1))
      throw OrderError("frequencies must be strictly ascending");
  }
  for (const auto& s : s_matrices) {
    if (s.rows() != port_count || s.cols() != port_count)
      throw ParseError("S-matrix size does not match port count");
    if (!s.allFinite()) throw ParseError("non-finite S-parameter entry");
  }
}

TouchstoneData parse_touchstone(const std::string& text, int ports_hint) {
  TouchstoneData data;
  bool have_options = false;
  NumberFormat fmt = NumberFormat::MA;  // Touchstone default
  double fscale = 1e9;                  // Touchstone default unit is GHz
  std::vector<double> tokens;

  std::istringstream stream(text);
  std::string line;
  while (std::getline(stream, line)) {
    if (const auto bang = line.find('!'); bang != std::string::npos)
      line.erase(bang);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;  // blank
    if (first[0] == '[')
      throw ParseError("Touchstone v2 keywords are not supported: " + first);
    if (first[0] == '#') {
      if (have_options) throw ParseError("duplicate option line");
      std::string unit = first.size() > 1 ? first.substr(1) : "";
      if (unit.empty() && !(ls >> unit))
        throw ParseError("option line missing frequency unit");
      std::string param, format, rtag;
      double z0 = 0;
      if (!(ls >> param >> format >> rtag >> z0))
        throw ParseError("malformed option line, expected"
                         " '# <unit> S <RI|MA|DB> R <Z0>'");
      if (upper(param) != "S")
        throw ParseError("only S-parameter files are supported");
      if (upper(rtag) != "R")
        throw ParseError("malformed option line: expected 'R <Z0>'");
      if (z0 <= 0) throw ParseError("reference impedance must be > 0");
      std::string rest;
      if (ls >> rest) throw ParseError("trailing tokens on option line");
      fscale = frequency_scale(unit);
      fmt = number_format(format);
      data.reference_impedance_ohm = z0;
      have_options = true;
      continue;
    }
    // data line
    ls.clear();
    ls.str(line);
    double value;
    while (ls >> value) tokens.push_back(value);
    if (!ls.eof()) {
      std::string bad;
      ls.clear();
      ls >> bad;
      throw ParseError("non-numeric token '" + bad + "' in data");
    }
  }
  if (!have_options) throw ParseError("missing option line");
  if (tokens.empty()) throw ParseError("no data lines");

  // Determine the port count: the record length is 1 + 2 N^2 and frequencies
  // must ascend strictly.
  int ports = 0;
  if (ports_hint > 0) {
    ports = ports_hint;
    if (tokens.size() % (1 + 2 * static_cast<std::size_t>(ports) * ports) != 0)
      throw ParseError("token count does not match " +
                       std::to_string(ports) + "-port records");
  } else {
    std::vector<int> candidates;
    for (int n = 1; n <= 32; ++n) {
      const std::size_t record = 1 + 2 * static_cast<std::size_t>(n) * n;
      if (tokens.size() % record != 0) continue;
      bool ascending = true;
      double prev = 0;
      for (std::size_t at = 0; at < tokens.size(); at += record) {
        if (tokens[at] <= prev) {
          ascending = false;
          break;
        }
        prev = tokens[at];
      }
      if (ascending) candidates.push_back(n);
    }
    if (candidates.empty())
      throw ParseError("cannot determine port count from data layout");
    if (candidates.size() > 1)
      throw ParseError("ambiguous port count, pass it explicitly");
    ports = candidates.front();
  }

  const std::size_t record = 1 + 2 * static_cast<std::size_t>(ports) * ports;
  const std::size_t n_freq = tokens.size() / record;
  data.port_count = ports;
  data.frequencies_hz.resize(static_cast<Eigen::Index>(n_freq));
  data.s_matrices.reserve(n_freq);
  for (std::size_t f = 0; f < n_freq; ++f) {
    const double* rec = tokens.data() + f * record;
    data.frequencies_hz(static_cast<Eigen::Index>(f)) = rec[0] * fscale;
    Eigen::MatrixXcd s(ports, ports);
    for (int e = 0; e < ports * ports; ++e) {
      const std::complex<double> value =
          to_complex(fmt, rec[1 + 2 * e], rec[2 + 2 * e]);
      // 2-port files run S11 S21 S12 S22 (column order); larger matrices are
      // row-major, per Touchstone v1.
      if (ports <= 2)
        s(e % ports, e / ports) = value;
      else
        s(e / ports, e % ports) = value;
    }
    data.s_matrices.push_back(std::move(s));
  }
  data.validate();
  return data;
}

std::string write_touchstone(const TouchstoneData& data) {
  data.validate();
  std::string out;
  char buf[64];
  std::snprintf(buf, sizeof buf, "# Hz S RI R %.17g\n",
                data.reference_impedance_ohm);
  out += buf;
  const int n = data.port_count;
  for (Eigen::Index f = 0; f < data.frequencies_hz.size(); ++f) {
    const Eigen::MatrixXcd& s = data.s_matrices[static_cast<std::size_t>(f)];
    std::snprintf(buf, sizeof buf, "%.17g", data.frequencies_hz(f));
    out += buf;
    if (n <= 2) {
      for (int e = 0; e < n * n; ++e) {
        const std::complex<double> v = s(e % n, e / n);
        std::snprintf(buf, sizeof buf, " %.17g %.17g", v.real(), v.imag());
        out += buf;
      }
      out += '\n';
    } else {
      // one matrix row per line, wrapped at 4 complex entries
      for (int r = 0; r < n; ++r) {
        int on_line = 0;
        for (int c = 0; c < n; ++c) {
          if (on_line == 4) {
            out += '\n';
            on_line = 0;
          }
          const std::complex<double> v = s(r, c);
          std::snprintf(buf, sizeof buf, " %.17g %.17g", v.real(), v.imag());
          out += buf;
          ++on_line;
        }
        out += '\n';
      }
    }
  }
  return out;
}

CouplingNetwork extract_network(const TouchstoneData& data,
                                double f_extract_hz) {
  data.validate();
  const Eigen::VectorXd& freqs = data.frequencies_hz;
  if (f_extract_hz < freqs(0) || f_extract_hz > freqs(freqs.size() - 1))
    throw ValidationError("extraction frequency " +
                          std::to_string(f_extract_hz) +
                          " Hz outside file range");
  Eigen::Index hi = 0;
  while (freqs(hi) < f_extract_hz) ++hi;
  Eigen::MatrixXcd s;
  if (freqs(hi) == f_extract_hz || hi == 0) {
    s = data.s_matrices[static_cast<std::size_t>(hi)];
  } else {
    const double w =
        (f_extract_hz - freqs(hi - 1)) / (freqs(hi) - freqs(hi - 1));
    s = (1.0 - w) * data.s_matrices[static_cast<std::size_t>(hi - 1)] +
        w * data.s_matrices[static_cast<std::size_t>(hi)];
  }

  const int n = data.port_count;
  const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(n, n);
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(eye - s);
  if (!lu.isInvertible())
    throw SingularityError("(I - S) is singular at the extraction frequency");
  const Eigen::MatrixXcd z =
      data.reference_impedance_ohm * lu.solve(eye + s);

  const double omega = 2.0 * std::numbers::pi * f_extract_hz;
  CouplingNetwork net;
  net.resistance_ohm.resize(n);
  net.inductance_h.resize(n);
  net.mutual_h = Eigen::MatrixXd::Zero(n, n);
  net.shunt_c_f = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    net.resistance_ohm(i) = z(i, i).real();
    net.inductance_h(i) = z(i, i).imag() / omega;
    for (int j = i + 1; j < n; ++j) {
      // symmetrized, so reciprocal inputs give exactly symmetric M
      const double m = 0.5 * (z(i, j).imag() + z(j, i).imag()) / omega;
      net.mutual_h(i, j) = m;
      net.mutual_h(j, i) = m;
    }
  }

  if ((net.inductance_h.array() <= 0).any())
    throw PassivityError("extracted self-inductance is not positive");
  if ((net.resistance_ohm.array() < 0).any())
    throw PassivityError("extracted negative series resistance");
  Eigen::LLT<Eigen::MatrixXd> llt(net.inductance_matrix());
  if (llt.info() != Eigen::Success)
    throw PassivityError("extracted inductance matrix not positive definite");
  net.validate();
  return net;
}

ChannelDiagnostics check_reciprocity_passivity(const TouchstoneData& data,
                                               double tol) {
  data.validate();
  ChannelDiagnostics report;
  report.tolerance = tol;
  for (Eigen::Index f = 0; f < data.frequencies_hz.size(); ++f) {
    const Eigen::MatrixXcd& s = data.s_matrices[static_cast<std::size_t>(f)];
    ChannelDiagnostics::Entry entry;
    entry.frequency_hz = data.frequencies_hz(f);
    entry.max_asymmetry =
        (s - s.transpose()).cwiseAbs().maxCoeff();
    entry.max_singular_value =
        Eigen::JacobiSVD<Eigen::MatrixXcd>(s).singularValues()(0);
    entry.reciprocal = entry.max_asymmetry <= tol;
    entry.passive = entry.max_singular_value <= 1.0 + tol;
    report.all_reciprocal = report.all_reciprocal && entry.reciprocal;
    report.all_passive = report.all_passive && entry.passive;
    report.entries.push_back(entry);
  }
  return report;
}

std::string diagnostics_table(const ChannelDiagnostics& report) {
  std::string out =
      "# freq_hz max_asym sigma_max reciprocal passive\n";
  char line[128];
  for (const auto& e : report.entries) {
    std::snprintf(line, sizeof line, "%.9g %.6g %.6g %s %s\n",
                  e.frequency_hz, e.max_asymmetry, e.max_singular_value,
                  e.reciprocal ? "yes" : "NO", e.passive ? "yes" : "NO");
    out += line;
  }
  return out;
}

TouchstoneData scatter_from_network(const CouplingNetwork& net,
                                    const Eigen::VectorXd& frequencies_hz,
                                    double z0_ohm) {
  net.validate();
  const Eigen::Index n = net.size();
  TouchstoneData data;
  data.port_count = static_cast<int>(n);
  data.reference_impedance_ohm = z0_ohm;
  data.frequencies_hz = frequencies_hz;
  data.s_matrices.reserve(static_cast<std::size_t>(frequencies_hz.size()));
  const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(n, n);
  const std::complex<double> jay(0.0, 1.0);
  for (Eigen::Index f = 0; f < frequencies_hz.size(); ++f) {
    const double omega = 2.0 * std::numbers::pi * frequencies_hz(f);
    Eigen::MatrixXcd z =
        jay * omega * net.inductance_matrix().cast<std::complex<double>>();
    z.diagonal() += net.resistance_ohm.cast<std::complex<double>>();
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(z + z0_ohm * eye);
    data.s_matrices.push_back(lu.solve(z - z0_ohm * eye));
  }
  data.validate();
  return data;
}

}  // namespace icl
