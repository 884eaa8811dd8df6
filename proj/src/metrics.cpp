#include "icl/metrics.hpp"

#include <cmath>

namespace icl {

namespace {

void require_same_grid(const Waveform& a, const Waveform& b) {
  if (a.t0_s != b.t0_s || a.dt_s != b.dt_s || a.size() != b.size())
    throw ShapeError("waveforms are on different sampling grids");
}

double trapezoid(const Eigen::ArrayXd& y, double dt) {
  if (y.size() < 2) return 0.0;
  return dt * (y.sum() - 0.5 * (y[0] + y[y.size() - 1]));
}

}  // namespace

double tx_energy(const Waveform& drive_v, const Waveform& coil_current) {
  require_same_grid(drive_v, coil_current);
  return trapezoid(drive_v.samples * coil_current.samples, drive_v.dt_s);
}

std::size_t count_transitions(const Levels& levels, int idle_level) {
  std::size_t count = 0;
  int prev = idle_level;
  for (int8_t level : levels) {
    if (level != prev) ++count;
    prev = level;
  }
  return count;
}

std::size_t count_pulses(const TernaryFrame& frame) {
  std::size_t count = 0;
  for (int8_t s : frame.symbols)
    if (s != 0) ++count;
  return count;
}

CrosstalkMetrics crosstalk_metrics(const Waveform& intended_rx,
                                   const Waveform& victim_rx,
                                   double load_ohm) {
  if (load_ohm <= 0) throw DegenerateError("load must be > 0");
  const double victim_peak =
      victim_rx.size() ? victim_rx.samples.abs().maxCoeff() : 0.0;
  const double intended_peak =
      intended_rx.size() ? intended_rx.samples.abs().maxCoeff() : 0.0;
  if (victim_peak == 0.0)
    return {0.0, 0.0};
  if (intended_peak == 0.0)
    throw DegenerateError("intended waveform is identically zero");
  const double energy =
      trapezoid(victim_rx.samples.square(), victim_rx.dt_s) / load_ohm;
  return {victim_peak / intended_peak, energy};
}

WilsonInterval wilson_interval(std::size_t errors, std::size_t total) {
  if (total == 0) return {0.0, 1.0};
  const double z = 1.959963984540054;  // 95%
  const double n = static_cast<double>(total);
  const double p = static_cast<double>(errors) / n;
  const double z2n = z * z / n;
  const double center = (p + z2n / 2.0) / (1.0 + z2n);
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z2n / (4.0 * n)) / (1.0 + z2n);
  WilsonInterval ci{std::max(0.0, center - half), std::min(1.0, center + half)};
  if (errors == 0) ci.low = 0.0;          // exact endpoints at the boundary
  if (errors == total) ci.high = 1.0;
  return ci;
}

namespace {

// Total ternary decode for noisy streams: invalid pairs become 000.
Bits decode_ternary_lenient(const Symbols& symbols, std::size_t payload_bits) {
  Bits bits;
  bits.reserve(payload_bits);
  for (std::size_t t = 0; 2 * t + 1 < symbols.size(); ++t) {
    const int v = 3 * symbols[2 * t] + symbols[2 * t + 1];
    const int b = (v == 0) ? 0 : (v < 0 ? v + 4 : v + 3);
    for (int k = 2; k >= 0; --k)
      if (bits.size() < payload_bits)
        bits.push_back(static_cast<uint8_t>((b >> k) & 1));
  }
  bits.resize(payload_bits, 0);
  return bits;
}

Bits decode_prepared(const PreparedLink& link, const Waveform& rx) {
  if (link.scheme == "ternary") {
    const std::size_t n_symbols = 2 * ((link.payload.size() + 2) / 3);
    Symbols symbols =
        detect_ternary(rx, link.receiver, link.symbol_period_s, n_symbols);
    return decode_ternary_lenient(symbols, link.payload.size());
  }
  if (link.scheme == "nrz")
    return detect_nrz(rx, link.receiver, link.symbol_period_s,
                      link.payload.size(), link.nrz_idle_level);
  if (link.scheme == "biphase")
    return detect_biphase(rx, link.symbol_period_s, link.payload.size());
  throw ConfigError("unknown scheme '" + link.scheme + "'");
}

}  // namespace

BerEstimate estimate_ber(const PreparedLink& link, std::size_t n_trials,
                         const NoiseParams& noise) {
  if (n_trials < 1) throw ConfigError("need at least one trial");
  BerEstimate est;
  for (std::size_t trial = 0; trial < n_trials; ++trial) {
    NoiseParams trial_noise = noise;
    trial_noise.seed = noise.seed + trial;
    const Waveform rx = add_noise(link.clean_rx, trial_noise);
    const Bits decoded = decode_prepared(link, rx);
    for (std::size_t i = 0; i < link.payload.size(); ++i)
      if (decoded[i] != link.payload[i]) ++est.bit_errors;
    est.bits_total += link.payload.size();
  }
  est.ber = est.bits_total
                ? static_cast<double>(est.bit_errors) / est.bits_total
                : 0.0;
  est.ci = wilson_interval(est.bit_errors, est.bits_total);
  return est;
}

}  // namespace icl
