// Link-level figures of merit: supply energy, transition/pulse counts,
// crosstalk, and Monte-Carlo bit error rate.
#pragma once

#include <optional>
#include <string>

#include "icl/codec.hpp"
#include "icl/sim.hpp"

namespace icl {

// One experiment's results for one line code.
struct LinkReport {
  std::string scheme;
  double duration_s = 0.0;
  double tx_energy_j = 0.0;
  std::size_t transitions_or_pulses = 0;
  std::size_t bits = 0;
  std::size_t symbols = 0;
  double bits_per_symbol = 0.0;
  std::optional<double> crosstalk_peak_ratio;
  std::optional<double> crosstalk_energy_j;
  std::optional<double> ber;
  std::optional<double> ber_ci_low;
  std::optional<double> ber_ci_high;
  bool decoded_ok = false;
};

// Supply-delivered energy at the bridge terminals: trapezoidal integral of
// drive voltage times coil current.
double tx_energy(const Waveform& drive_v, const Waveform& coil_current);

std::size_t count_transitions(const Levels& levels, int idle_level);
std::size_t count_pulses(const TernaryFrame& frame);

struct CrosstalkMetrics {
  double peak_ratio;       // max |victim| / max |intended|
  double victim_energy_j;  // integral of v^2 / load
};
CrosstalkMetrics crosstalk_metrics(const Waveform& intended_rx,
                                   const Waveform& victim_rx, double load_ohm);

// 95% Wilson score interval for k errors in n trials.
struct WilsonInterval {
  double low, high;
};
WilsonInterval wilson_interval(std::size_t errors, std::size_t total);

// Everything needed to re-detect one clean link under noise: the noiseless
// receive waveform plus the detector configuration.  Decoding is total here:
// an undecodable ternary pair counts as an all-zero triplet.
struct PreparedLink {
  std::string scheme;  // "nrz" | "biphase" | "ternary"
  Waveform clean_rx;
  Bits payload;
  ReceiverParams receiver;
  double symbol_period_s = 1e-9;
  int nrz_idle_level = -1;
};

struct BerEstimate {
  std::size_t bit_errors = 0;
  std::size_t bits_total = 0;
  double ber = 0.0;
  WilsonInterval ci{0.0, 0.0};
};

// Per-trial seeds are noise.seed + trial index, so estimates are
// reproducible and different sigmas can share paired seeds.
BerEstimate estimate_ber(const PreparedLink& link, std::size_t n_trials,
                         const NoiseParams& noise);

}  // namespace icl
