// Drive synthesis, coupled-coil transient solver, and symbol detection.
//
// The solver integrates  L di/dt = v(t) - R i - v_load(i)  over the full
// mutual-inductance matrix with the implicit trapezoidal rule (A-stable,
// second order).  Passive coils see their load resistance in series and
// report the load drop as terminal voltage; an optional shunt capacitance
// across a passive coil's load adds one state per coil.
#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "icl/codec.hpp"
#include "icl/errors.hpp"
#include "icl/network.hpp"

namespace icl {

enum class SignalKind { Volts, Amps };

// Uniformly sampled time series.
struct Waveform {
  double t0_s = 0.0;
  double dt_s = 1.0;
  Eigen::ArrayXd samples;
  SignalKind kind = SignalKind::Volts;

  Eigen::Index size() const { return samples.size(); }
  double duration_s() const {
    return samples.size() > 0 ? (samples.size() - 1) * dt_s : 0.0;
  }
  double time_at(Eigen::Index i) const { return t0_s + i * dt_s; }
};

std::string waveform_csv(const Waveform& w);  // "time,value" lines

struct HBridgeParams {
  double supply_voltage_v = 1.0;
  double on_resistance_ohm = 10.0;
  double edge_time_s = 0.1e-9;
  double symbol_period_s = 1.0e-9;
  bool zero_high_z = false;  // 0-symbol bridge state: false = shorted to 0 V
  // Off-state source impedance for zero_high_z slots.  Kept finite so the
  // residual coil current has a flyback path, as a real bridge's clamps
  // provide.
  double off_resistance_ohm = 10e3;

  void validate() const;
};

// How slot values map onto the line: NRZ holds its level between slots,
// pulsed codes (ternary, bi-phase) return to 0 V inside every slot.
enum class DriveMode { Hold, ReturnToZero };

// Piecewise-linear bridge output voltage sampled at dt; spans exactly
// n_slots * symbol_period.  In Hold mode the line starts settled at
// idle_level and ramps back to 0 at the frame end.
Waveform synthesize_drive(const Symbols& values, const HBridgeParams& p,
                          double dt_s, DriveMode mode, int idle_level = 0);

// Per-slot extra series resistance (high-impedance 0-symbol modelling).
struct SeriesSchedule {
  double slot_period_s = 0.0;
  std::vector<double> per_slot_ohm;

  double at(double t_s) const;
};

// Extra series resistance schedule for a drive: the bridge on-resistance
// during active slots, a large open value during 0-symbol slots when
// zero_high_z is set.
SeriesSchedule bridge_series_schedule(const Symbols& values,
                                      const HBridgeParams& p);

struct TransientResult {
  std::vector<Waveform> coil_current;      // one per coil
  std::vector<Waveform> terminal_voltage;  // passive coils only; empty else
};

// drives[k] absent marks coil k passive; rx_load_ohm applies to passive
// coils (use ~1e9 for an effectively open receiver).  series[k] adds the
// bridge on-resistance schedule of driven coils.
TransientResult simulate_transient(
    const CouplingNetwork& net, const std::vector<std::optional<Waveform>>& drives,
    const Eigen::VectorXd& rx_load_ohm, double dt_s,
    const std::vector<std::optional<SeriesSchedule>>& series = {});

struct ReceiverParams {
  double load_ohm = 1000.0;
  double threshold_v = 0.05;
  double hysteresis_v = 0.0;

  void validate() const;
};

struct NoiseParams {
  double sigma_v = 0.0;
  uint64_t seed = 0;
};

// Peak detection over the central 60% of each slot: +1 when the positive
// excursion dominates and clears the threshold, -1 for the negative mirror
// image, 0 otherwise.
Symbols detect_ternary(const Waveform& rx, const ReceiverParams& p,
                       double symbol_period_s, std::size_t n_symbols);

// Hysteresis latch: a positive pulse above threshold flips the bit to 1, a
// negative pulse below -threshold flips it to 0; starts from idle_level.
Bits detect_nrz(const Waveform& rx, const ReceiverParams& p,
                double symbol_period_s, std::size_t n_bits, int idle_level);

// One pulse per slot by construction: the dominant excursion's sign is the
// bit.
Bits detect_biphase(const Waveform& rx, double symbol_period_s,
                    std::size_t n_bits);

// Additive white Gaussian noise, Box-Muller over a seeded mt19937_64, so a
// fixed seed reproduces the exact sample sequence.
Waveform add_noise(const Waveform& w, const NoiseParams& n);

// Largest |v| over the central detection windows of all slots; the
// calibration reference for threshold setting (the detector never looks
// outside these windows).
double detection_window_peak(const Waveform& rx, double symbol_period_s,
                             std::size_t n_slots);

}  // namespace icl
