#include "icl/sim.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <string>

namespace icl {

namespace {

double slot_of(double t_s, double period_s, std::size_t n_slots) {
  double k = std::floor(t_s / period_s);
  return std::clamp(k, 0.0, static_cast<double>(n_slots) - 1.0);
}

}  // namespace

std::string waveform_csv(const Waveform& w) {
  std::string out = "time_s,value\n";
  char line[64];
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    std::snprintf(line, sizeof line, "%.17g,%.17g\n", w.time_at(i),
                  w.samples[i]);
    out += line;
  }
  return out;
}

void HBridgeParams::validate() const {
  if (supply_voltage_v <= 0) throw ConfigError("supply voltage must be > 0");
  if (on_resistance_ohm <= 0) throw ConfigError("on-resistance must be > 0");
  if (edge_time_s <= 0 || 2.0 * edge_time_s > symbol_period_s)
    throw ConfigError(
        "edge time must satisfy 0 < 2 * edge_time <= symbol_period");
}

Waveform synthesize_drive(const Symbols& values, const HBridgeParams& p,
                          double dt_s, DriveMode mode, int idle_level) {
  p.validate();
  if (dt_s <= 0) throw ConfigError("sample period must be > 0");
  const double T = p.symbol_period_s;
  const double edge = p.edge_time_s;
  const double V = p.supply_voltage_v;
  const std::size_t n = values.size();

  Waveform w;
  w.dt_s = dt_s;
  w.kind = SignalKind::Volts;
  if (n == 0) return w;  // zero-length waveform

  const double span = static_cast<double>(n) * T;
  const Eigen::Index samples = static_cast<Eigen::Index>(std::llround(span / dt_s)) + 1;
  w.samples.resize(samples);

  if (mode == DriveMode::ReturnToZero && edge > 0.2 * T)
    throw ConfigError("pulsed drive needs edge_time <= symbol_period / 5");

  for (Eigen::Index i = 0; i < samples; ++i) {
    const double t = i * dt_s;
    double v = 0.0;
    const auto k = static_cast<std::size_t>(slot_of(t, T, n));
    const double tau = t - static_cast<double>(k) * T;
    if (mode == DriveMode::ReturnToZero) {
      // Pulse centered on the slot (active over [0.2T, 0.8T + edge]) so the
      // received doublet's leading lobe lands inside the detector's central
      // window and the coil current resets in the gap before the next slot.
      const double level = values[k] * V;
      if (level != 0.0) {
        const double rise = 0.2 * T;
        const double fall = 0.8 * T;
        if (tau >= rise && tau < rise + edge)
          v = level * ((tau - rise) / edge);
        else if (tau >= rise + edge && tau <= fall)
          v = level;
        else if (tau > fall && tau < fall + edge)
          v = level * ((fall + edge - tau) / edge);
      }
    } else {  // Hold
      const double prev = (k == 0 ? idle_level : values[k - 1]) * V;
      const double cur = values[k] * V;
      if (t >= span - edge)
        v = values[n - 1] * V * ((span - t) / edge);  // frame-end return
      else if (tau < edge)
        v = prev + (cur - prev) * (tau / edge);
      else
        v = cur;
    }
    w.samples[i] = v;
  }
  return w;
}

double SeriesSchedule::at(double t_s) const {
  if (per_slot_ohm.empty()) return 0.0;
  const auto k = static_cast<std::size_t>(
      slot_of(t_s, slot_period_s, per_slot_ohm.size()));
  return per_slot_ohm[k];
}

SeriesSchedule bridge_series_schedule(const Symbols& values,
                                      const HBridgeParams& p) {
  SeriesSchedule sched;
  sched.slot_period_s = p.symbol_period_s;
  sched.per_slot_ohm.reserve(values.size());
  for (int8_t v : values)
    sched.per_slot_ohm.push_back((p.zero_high_z && v == 0)
                                     ? p.off_resistance_ohm
                                     : p.on_resistance_ohm);
  return sched;
}

TransientResult simulate_transient(
    const CouplingNetwork& net,
    const std::vector<std::optional<Waveform>>& drives,
    const Eigen::VectorXd& rx_load_ohm, double dt_s,
    const std::vector<std::optional<SeriesSchedule>>& series) {
  net.validate();
  const Eigen::Index n = net.size();
  if (static_cast<Eigen::Index>(drives.size()) != n)
    throw ConfigError("drive list size does not match coil count");
  if (rx_load_ohm.size() != n)
    throw ConfigError("load list size does not match coil count");
  if (!series.empty() && static_cast<Eigen::Index>(series.size()) != n)
    throw ConfigError("series schedule size does not match coil count");
  if (dt_s <= 0) throw ConfigError("dt must be > 0");

  // All drives must share the sampling grid.
  Eigen::Index samples = -1;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!drives[k]) continue;
    const Waveform& d = *drives[k];
    if (std::abs(d.dt_s - dt_s) > 1e-9 * dt_s || d.t0_s != 0.0)
      throw ConfigError("drive waveforms must be sampled at the solver grid");
    if (samples < 0)
      samples = d.size();
    else if (d.size() != samples)
      throw ConfigError("drive waveforms have mismatched lengths");
  }
  if (samples < 0) throw ConfigError("at least one coil must be driven");

  std::vector<bool> driven(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k)
    driven[static_cast<std::size_t>(k)] = drives[k].has_value();

  // Passive coils with shunt capacitance get one extra state (the terminal
  // voltage across the load/C pair).
  std::vector<Eigen::Index> cap_state(static_cast<std::size_t>(n), -1);
  Eigen::Index m = 0;
  if (net.shunt_c_f.size() == n) {
    for (Eigen::Index k = 0; k < n; ++k)
      if (!driven[static_cast<std::size_t>(k)] && net.shunt_c_f(k) > 0)
        cap_state[static_cast<std::size_t>(k)] = n + m++;
  }
  const Eigen::Index dim = n + m;

  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(dim, dim);
  E.topLeftCorner(n, n) = net.inductance_matrix();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    double r = net.resistance_ohm(k);
    if (!driven[ku]) {
      if (cap_state[ku] >= 0) {
        const Eigen::Index c = cap_state[ku];
        E(c, c) = net.shunt_c_f(k);
        A(k, c) = -1.0;
        A(c, k) = 1.0;
        A(c, c) = -1.0 / rx_load_ohm(k);
      } else {
        r += rx_load_ohm(k);
      }
    }
    A(k, k) = -r;
  }

  auto extra_at = [&](double t) {
    Eigen::VectorXd extra = Eigen::VectorXd::Zero(n);
    if (!series.empty())
      for (Eigen::Index k = 0; k < n; ++k)
        if (series[static_cast<std::size_t>(k)])
          extra(k) = series[static_cast<std::size_t>(k)]->at(t);
    return extra;
  };

  Eigen::FullPivLU<Eigen::MatrixXd> lu;
  Eigen::MatrixXd Mminus(dim, dim);
  Eigen::VectorXd current_extra =
      Eigen::VectorXd::Constant(n, std::numeric_limits<double>::quiet_NaN());
  auto factor_for = [&](const Eigen::VectorXd& extra) {
    Eigen::MatrixXd At = A;
    At.diagonal().head(n) -= extra;
    Eigen::MatrixXd Mplus = E / dt_s - 0.5 * At;
    Mminus = E / dt_s + 0.5 * At;
    lu.compute(Mplus);
    if (!lu.isInvertible())
      throw SolverError("per-step linear system is singular");
    current_extra = extra;
  };

  // Initial state: driven coils settled at their t=0 drive level (DC), all
  // other states at rest.
  Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
  const Eigen::VectorXd extra0 = extra_at(0.0);
  for (Eigen::Index k = 0; k < n && samples > 0; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    if (driven[ku]) {
      const double r = net.resistance_ohm(k) + extra0(k);
      if (r <= 0) throw SolverError("driven coil has zero series resistance");
      x(k) = drives[k]->samples[0] / r;
    }
  }
  factor_for(extra0);

  TransientResult result;
  result.coil_current.resize(static_cast<std::size_t>(n));
  result.terminal_voltage.resize(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    result.coil_current[ku].dt_s = dt_s;
    result.coil_current[ku].kind = SignalKind::Amps;
    result.coil_current[ku].samples.resize(samples);
    result.terminal_voltage[ku].dt_s = dt_s;
    result.terminal_voltage[ku].kind = SignalKind::Volts;
    if (!driven[ku]) result.terminal_voltage[ku].samples.resize(samples);
  }
  if (samples == 0) return result;

  Eigen::VectorXd b_now = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd b_next = Eigen::VectorXd::Zero(dim);
  auto record = [&](Eigen::Index i) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      result.coil_current[ku].samples[i] = x(k);
      if (!driven[ku]) {
        const double u = (cap_state[ku] >= 0) ? x(cap_state[ku])
                                              : rx_load_ohm(k) * x(k);
        result.terminal_voltage[ku].samples[i] = -u;
      }
    }
  };
  auto fill_b = [&](Eigen::VectorXd& b, Eigen::Index i) {
    for (Eigen::Index k = 0; k < n; ++k)
      if (driven[static_cast<std::size_t>(k)])
        b(k) = drives[k]->samples[i];
  };

  record(0);
  fill_b(b_now, 0);
  for (Eigen::Index i = 1; i < samples; ++i) {
    const Eigen::VectorXd extra = extra_at((i - 1) * dt_s);
    if (!(extra.array() == current_extra.array()).all()) factor_for(extra);
    fill_b(b_next, i);
    x = lu.solve(Mminus * x + 0.5 * (b_now + b_next));
    record(i);
    b_now.swap(b_next);
  }
  return result;
}

void ReceiverParams::validate() const {
  if (load_ohm <= 0) throw ConfigError("receiver load must be > 0");
  if (!(threshold_v > hysteresis_v) || hysteresis_v < 0)
    throw ConfigError("receiver needs threshold > hysteresis >= 0");
}

namespace {

struct SlotWindow {
  double vmax;
  double vmin;
};

// Central 60% of each slot.
std::vector<SlotWindow> slot_windows(const Waveform& rx, double period_s,
                                     std::size_t n_slots) {
  const double span = static_cast<double>(n_slots) * period_s;
  if (rx.duration_s() + 0.5 * rx.dt_s < span)
    throw WindowError("waveform spans " + std::to_string(rx.duration_s()) +
                      " s, need " + std::to_string(span) + " s");
  std::vector<SlotWindow> windows;
  windows.reserve(n_slots);
  for (std::size_t k = 0; k < n_slots; ++k) {
    const double lo_t = (k + 0.2) * period_s - rx.t0_s;
    const double hi_t = (k + 0.8) * period_s - rx.t0_s;
    const auto lo = static_cast<Eigen::Index>(std::ceil(lo_t / rx.dt_s - 1e-9));
    auto hi = static_cast<Eigen::Index>(std::floor(hi_t / rx.dt_s + 1e-9));
    hi = std::min(hi, rx.size() - 1);
    SlotWindow w{0.0, 0.0};
    bool first = true;
    for (Eigen::Index i = std::max<Eigen::Index>(lo, 0); i <= hi; ++i) {
      if (first) {
        w.vmax = w.vmin = rx.samples[i];
        first = false;
      } else {
        w.vmax = std::max(w.vmax, rx.samples[i]);
        w.vmin = std::min(w.vmin, rx.samples[i]);
      }
    }
    windows.push_back(w);
  }
  return windows;
}

}  // namespace

Symbols detect_ternary(const Waveform& rx, const ReceiverParams& p,
                       double symbol_period_s, std::size_t n_symbols) {
  p.validate();
  Symbols out;
  out.reserve(n_symbols);
  for (const SlotWindow& w : slot_windows(rx, symbol_period_s, n_symbols)) {
    if (w.vmax > p.threshold_v && w.vmax >= -w.vmin)
      out.push_back(+1);
    else if (w.vmin < -p.threshold_v && -w.vmin > w.vmax)
      out.push_back(-1);
    else
      out.push_back(0);
  }
  return out;
}

Bits detect_nrz(const Waveform& rx, const ReceiverParams& p,
                double symbol_period_s, std::size_t n_bits, int idle_level) {
  p.validate();
  Bits out;
  out.reserve(n_bits);
  uint8_t latch = idle_level > 0 ? 1 : 0;
  const double flip = p.threshold_v + p.hysteresis_v;
  for (const SlotWindow& w : slot_windows(rx, symbol_period_s, n_bits)) {
    if (latch == 0 && w.vmax > flip && w.vmax >= -w.vmin)
      latch = 1;
    else if (latch == 1 && w.vmin < -flip && -w.vmin > w.vmax)
      latch = 0;
    out.push_back(latch);
  }
  return out;
}

Bits detect_biphase(const Waveform& rx, double symbol_period_s,
                    std::size_t n_bits) {
  Bits out;
  out.reserve(n_bits);
  for (const SlotWindow& w : slot_windows(rx, symbol_period_s, n_bits))
    out.push_back(w.vmax + w.vmin >= 0 ? 1 : 0);
  return out;
}

double detection_window_peak(const Waveform& rx, double symbol_period_s,
                             std::size_t n_slots) {
  double peak = 0;
  for (const SlotWindow& w : slot_windows(rx, symbol_period_s, n_slots))
    peak = std::max({peak, w.vmax, -w.vmin});
  return peak;
}

Waveform add_noise(const Waveform& w, const NoiseParams& n) {
  Waveform out = w;
  if (n.sigma_v == 0) return out;
  std::mt19937_64 rng(n.seed);
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  constexpr double k53 = 1.0 / 9007199254740992.0;  // 2^-53
  Eigen::Index i = 0;
  while (i < out.size()) {
    const double u1 = static_cast<double>(rng() >> 11) * k53;
    const double u2 = static_cast<double>(rng() >> 11) * k53;
    const double mag = std::sqrt(-2.0 * std::log1p(-u1));
    out.samples[i++] += n.sigma_v * mag * std::cos(kTwoPi * u2);
    if (i < out.size()) out.samples[i++] += n.sigma_v * mag * std::sin(kTwoPi * u2);
  }
  return out;
}

}  // namespace icl
