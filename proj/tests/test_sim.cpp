#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "icl/codec.hpp"
#include "icl/magnetics.hpp"
#include "icl/sim.hpp"

using namespace icl;

namespace {

CouplingNetwork single_coil(double r_ohm, double l_h) {
  CouplingNetwork net;
  net.resistance_ohm = Eigen::VectorXd::Constant(1, r_ohm);
  net.inductance_h = Eigen::VectorXd::Constant(1, l_h);
  net.mutual_h = Eigen::MatrixXd::Zero(1, 1);
  net.shunt_c_f = Eigen::VectorXd::Zero(1);
  return net;
}

const CouplingNetwork& default_pair() {
  static const CouplingNetwork net =
      build_network({{CoilGeometry{}, {}}, {CoilGeometry{}, {0, 0, 106}}});
  return net;
}

Eigen::VectorXd loads2(double rx_ohm) {
  Eigen::VectorXd v(2);
  v << 0.0, rx_ohm;
  return v;
}

constexpr double kDt = 5e-12;

}  // namespace

TEST_CASE("drive synthesis shapes") {
  HBridgeParams p;  // 1 V, 1 ns slot, 0.1 ns edge

  CHECK(synthesize_drive({}, p, kDt, DriveMode::ReturnToZero).size() == 0);

  // single +1 pulse: centered, ramps over edge_time, returns inside the slot
  Waveform pulse = synthesize_drive({+1}, p, kDt, DriveMode::ReturnToZero);
  CHECK(pulse.size() == 201);
  CHECK(pulse.samples[0] == 0.0);
  CHECK(pulse.samples[40] == 0.0);                       // 0.2 ns: ramp start
  CHECK(pulse.samples[50] == doctest::Approx(0.5));      // mid-ramp
  CHECK(pulse.samples[60] == doctest::Approx(1.0));      // ramp done
  CHECK(pulse.samples[160] == doctest::Approx(1.0));     // hold through 0.8 ns
  CHECK(pulse.samples[170] == doctest::Approx(0.5));     // falling
  CHECK(pulse.samples[180] == doctest::Approx(0.0));     // returned
  CHECK(pulse.samples[200] == 0.0);

  // 0-symbols drive 0 V
  Waveform zero = synthesize_drive({0, 0}, p, kDt, DriveMode::ReturnToZero);
  CHECK(zero.samples.abs().maxCoeff() == 0.0);

  // 16-symbol ternary frame spans 16 ns; 24 NRZ levels span 24 ns
  Bits payload = parse_bits("000001010011100101110111");
  TernaryFrame frame = encode_ternary(payload);
  Waveform tdrive =
      synthesize_drive(frame.symbols, p, kDt, DriveMode::ReturnToZero);
  CHECK(tdrive.duration_s() == doctest::Approx(16e-9));
  Levels levels = encode_nrz(payload);
  Waveform ndrive = synthesize_drive({levels.begin(), levels.end()}, p, kDt,
                                     DriveMode::Hold, -1);
  CHECK(ndrive.duration_s() == doctest::Approx(24e-9));
  // NRZ starts at the idle level and holds across equal bits
  CHECK(ndrive.samples[0] == -1.0);
  CHECK(ndrive.samples[400] == -1.0);  // third 0 bit

  HBridgeParams bad = p;
  bad.edge_time_s = 0.6e-9;
  CHECK_THROWS_AS(synthesize_drive({+1}, bad, kDt, DriveMode::ReturnToZero),
                  ConfigError);
  bad.edge_time_s = 1.1e-9;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("zero drive gives zero response") {
  Waveform silence;
  silence.dt_s = kDt;
  silence.samples = Eigen::ArrayXd::Zero(1000);
  auto res = simulate_transient(default_pair(), {silence, std::nullopt},
                                loads2(1000), kDt);
  CHECK(res.coil_current[0].samples.abs().maxCoeff() == 0.0);
  CHECK(res.coil_current[1].samples.abs().maxCoeff() == 0.0);
  CHECK(res.terminal_voltage[1].samples.abs().maxCoeff() == 0.0);
  CHECK(res.terminal_voltage[0].size() == 0);  // driven coil has no rx lead
}

TEST_CASE("RL step matches the analytic curve") {
  const double r = 100.0, l = 10e-9, tau = l / r;
  const double dt = tau / 1000.0;
  Waveform step;
  step.dt_s = dt;
  step.samples = Eigen::ArrayXd::Constant(5001, 1.0);
  step.samples[0] = 0.0;
  auto res = simulate_transient(single_coil(r, l), {step},
                                Eigen::VectorXd::Constant(1, 1e9), dt);
  double worst = 0;
  for (int i = 1; i <= 5000; ++i) {
    const double exact = (1.0 / r) * (1.0 - std::exp(-i * dt / tau));
    worst = std::max(worst,
                     std::abs(res.coil_current[0].samples[i] - exact) * r);
  }
  CHECK(worst < 1e-3);  // 0.1% of the V/R scale
}

TEST_CASE("induced voltage integrates to M * dI") {
  HBridgeParams p;
  p.symbol_period_s = 3e-9;  // settle well before the frame-end return
  Waveform drive = synthesize_drive({+1}, p, kDt, DriveMode::Hold);
  auto res = simulate_transient(default_pair(), {drive, std::nullopt},
                                loads2(1e9), kDt,
                                {bridge_series_schedule({+1}, p), std::nullopt});
  const auto end = static_cast<Eigen::Index>((3e-9 - 2 * p.edge_time_s) / kDt);
  double integral = 0;
  for (Eigen::Index i = 0; i < end; ++i)
    integral += 0.5 * (res.terminal_voltage[1].samples[i] +
                       res.terminal_voltage[1].samples[i + 1]) * kDt;
  const double di =
      res.coil_current[0].samples[end] - res.coil_current[0].samples[0];
  const double expected = default_pair().mutual_h(0, 1) * di;
  CHECK(std::abs(integral - expected) / std::abs(expected) < 1e-3);
}

TEST_CASE("linearity and superposition") {
  Bits payload = parse_bits("1011");
  Levels levels = encode_nrz(payload);
  HBridgeParams p;
  Waveform d1 = synthesize_drive({levels.begin(), levels.end()}, p, kDt,
                                 DriveMode::Hold, -1);
  auto r1 = simulate_transient(default_pair(), {d1, std::nullopt},
                               loads2(1000), kDt);

  // doubling the drive doubles every sample exactly
  Waveform d2 = d1;
  d2.samples *= 2.0;
  auto r2 = simulate_transient(default_pair(), {d2, std::nullopt},
                               loads2(1000), kDt);
  CHECK((r2.coil_current[0].samples - 2.0 * r1.coil_current[0].samples)
            .abs()
            .maxCoeff() == 0.0);

  // superposition of two different drives
  Waveform d3 = d1;
  for (Eigen::Index i = 0; i < d3.size(); ++i)
    d3.samples[i] = 0.3 * std::sin(2e9 * i * kDt);
  Waveform sum = d1;
  sum.samples += d3.samples;
  auto r3 = simulate_transient(default_pair(), {d3, std::nullopt},
                               loads2(1000), kDt);
  auto rsum = simulate_transient(default_pair(), {sum, std::nullopt},
                                 loads2(1000), kDt);
  const double scale = rsum.coil_current[0].samples.abs().maxCoeff();
  CHECK((rsum.coil_current[0].samples - r1.coil_current[0].samples -
         r3.coil_current[0].samples)
            .abs()
            .maxCoeff() /
            scale <
        1e-12);
}

TEST_CASE("reciprocity: measured mutual is direction independent") {
  // asymmetric two-coil network
  CouplingNetwork net;
  net.resistance_ohm.resize(2);
  net.resistance_ohm << 50.0, 200.0;
  net.inductance_h.resize(2);
  net.inductance_h << 10e-9, 22e-9;
  net.mutual_h = Eigen::MatrixXd::Zero(2, 2);
  net.mutual_h(0, 1) = net.mutual_h(1, 0) = 3e-9;
  net.shunt_c_f = Eigen::VectorXd::Zero(2);

  HBridgeParams p;
  p.symbol_period_s = 4e-9;
  Waveform drive = synthesize_drive({+1}, p, kDt, DriveMode::Hold);
  auto measure = [&](int tx, int rx) {
    std::vector<std::optional<Waveform>> drives(2);
    drives[tx] = drive;
    Eigen::VectorXd loads = Eigen::VectorXd::Constant(2, 1e9);
    auto res = simulate_transient(net, drives, loads, kDt);
    const auto end =
        static_cast<Eigen::Index>((4e-9 - 2 * p.edge_time_s) / kDt);
    double integral = 0;
    for (Eigen::Index i = 0; i < end; ++i)
      integral += 0.5 * (res.terminal_voltage[rx].samples[i] +
                         res.terminal_voltage[rx].samples[i + 1]) * kDt;
    const double di =
        res.coil_current[tx].samples[end] - res.coil_current[tx].samples[0];
    return integral / di;  // measured M
  };
  const double m_ab = measure(0, 1);
  const double m_ba = measure(1, 0);
  CHECK(m_ab == doctest::Approx(3e-9).epsilon(1e-3));
  CHECK(m_ba == doctest::Approx(3e-9).epsilon(1e-3));
  CHECK(m_ab == doctest::Approx(m_ba).epsilon(1e-6));
}

TEST_CASE("step halving changes samples by < 0.05%") {
  Bits payload = parse_bits("000001010011100101110111");
  Levels levels = encode_nrz(payload);
  Symbols slots(levels.begin(), levels.end());
  HBridgeParams p;
  auto run = [&](double dt) {
    Waveform d = synthesize_drive(slots, p, dt, DriveMode::Hold, -1);
    return simulate_transient(default_pair(), {d, std::nullopt}, loads2(1000),
                              dt, {bridge_series_schedule(slots, p), std::nullopt});
  };
  auto coarse = run(5e-12);
  auto fine = run(2.5e-12);
  const double scale = coarse.coil_current[0].samples.abs().maxCoeff();
  double worst = 0;
  for (Eigen::Index i = 0; i < coarse.coil_current[0].size(); ++i)
    worst = std::max(worst, std::abs(fine.coil_current[0].samples[2 * i] -
                                     coarse.coil_current[0].samples[i]));
  CHECK(worst / scale < 5e-4);
}

TEST_CASE("config errors") {
  Waveform short_drive, long_drive;
  short_drive.dt_s = long_drive.dt_s = kDt;
  short_drive.samples = Eigen::ArrayXd::Zero(10);
  long_drive.samples = Eigen::ArrayXd::Zero(20);
  CouplingNetwork net = single_coil(10, 1e-9);
  CHECK_THROWS_AS(simulate_transient(net, {short_drive, long_drive},
                                     Eigen::VectorXd::Constant(1, 1e9), kDt),
                  ConfigError);
  CHECK_THROWS_AS(simulate_transient(net, {std::nullopt},
                                     Eigen::VectorXd::Constant(1, 1e9), kDt),
                  ConfigError);
  Waveform wrong_grid = short_drive;
  wrong_grid.dt_s = 2 * kDt;
  CHECK_THROWS_AS(simulate_transient(net, {wrong_grid},
                                     Eigen::VectorXd::Constant(1, 1e9), kDt),
                  ConfigError);
}

TEST_CASE("detector basics") {
  ReceiverParams p;
  p.threshold_v = 0.05;

  Waveform flat;
  flat.dt_s = kDt;
  flat.samples = Eigen::ArrayXd::Zero(801);  // spans 4 slots
  Symbols all_zero = detect_ternary(flat, p, 1e-9, 4);
  CHECK(all_zero == Symbols{0, 0, 0, 0});

  CHECK_THROWS_AS(detect_ternary(flat, p, 1e-9, 5), WindowError);

  // odd symmetry: negated waveform gives negated symbols
  HBridgeParams hb;
  Bits payload = parse_bits("010011");
  TernaryFrame frame = encode_ternary(payload);
  Waveform drive =
      synthesize_drive(frame.symbols, hb, kDt, DriveMode::ReturnToZero);
  auto res = simulate_transient(default_pair(), {drive, std::nullopt},
                                loads2(1000), kDt);
  Waveform rx = res.terminal_voltage[1];
  p.threshold_v = 0.4 * rx.samples.abs().maxCoeff();
  Symbols detected = detect_ternary(rx, p, 1e-9, frame.symbols.size());
  Waveform negated = rx;
  negated.samples = -negated.samples;
  Symbols mirrored = detect_ternary(negated, p, 1e-9, frame.symbols.size());
  REQUIRE(detected.size() == mirrored.size());
  for (std::size_t i = 0; i < detected.size(); ++i)
    CHECK(mirrored[i] == -detected[i]);
  CHECK(detected == frame.symbols);
}

TEST_CASE("nrz latch detector") {
  ReceiverParams p;
  p.threshold_v = 0.05;
  Waveform flat;
  flat.dt_s = kDt;
  flat.samples = Eigen::ArrayXd::Zero(801);
  CHECK(detect_nrz(flat, p, 1e-9, 4, -1) == Bits{0, 0, 0, 0});
  CHECK(detect_nrz(flat, p, 1e-9, 4, +1) == Bits{1, 1, 1, 1});

  // a positive doublet in slot 2 flips the latch from 0 to 1
  Waveform doublet = flat;
  doublet.samples.segment(500, 20) = 0.2;  // inside slot 2's window
  CHECK(detect_nrz(doublet, p, 1e-9, 4, -1) == Bits{0, 0, 1, 1});
}

TEST_CASE("end-to-end clean recovery on the stacked pair") {
  HBridgeParams hb;
  Bits payload = parse_bits("000001010011100101110111");

  TernaryFrame frame = encode_ternary(payload);
  Waveform tdrive =
      synthesize_drive(frame.symbols, hb, kDt, DriveMode::ReturnToZero);
  auto tres = simulate_transient(default_pair(), {tdrive, std::nullopt},
                                 loads2(1000), kDt);
  ReceiverParams rp;
  rp.threshold_v =
      0.4 * tres.terminal_voltage[1].samples.abs().maxCoeff();
  Symbols symbols = detect_ternary(tres.terminal_voltage[1], rp, 1e-9,
                                   frame.symbols.size());
  CHECK(symbols == frame.symbols);
  CHECK(decode_ternary({symbols, payload.size()}) == payload);

  Levels levels = encode_nrz(payload);
  Waveform ndrive = synthesize_drive({levels.begin(), levels.end()}, hb, kDt,
                                     DriveMode::Hold, -1);
  auto nres = simulate_transient(default_pair(), {ndrive, std::nullopt},
                                 loads2(1000), kDt);
  ReceiverParams np;
  np.threshold_v =
      0.4 * nres.terminal_voltage[1].samples.abs().maxCoeff();
  CHECK(detect_nrz(nres.terminal_voltage[1], np, 1e-9, payload.size(), -1) ==
        payload);

  Waveform bdrive = synthesize_drive({levels.begin(), levels.end()}, hb, kDt,
                                     DriveMode::ReturnToZero);
  auto bres = simulate_transient(default_pair(), {bdrive, std::nullopt},
                                 loads2(1000), kDt);
  CHECK(detect_biphase(bres.terminal_voltage[1], 1e-9, payload.size()) ==
        payload);
}

TEST_CASE("high-impedance zero symbols still decode") {
  HBridgeParams hb;
  hb.zero_high_z = true;
  Bits payload = parse_bits("000001010011100101110111");
  TernaryFrame frame = encode_ternary(payload);
  Waveform drive =
      synthesize_drive(frame.symbols, hb, kDt, DriveMode::ReturnToZero);
  auto sched = bridge_series_schedule(frame.symbols, hb);
  CHECK(sched.per_slot_ohm[2] == 10.0);   // -1 symbol: bridge on
  CHECK(sched.per_slot_ohm[3] == hb.off_resistance_ohm);  // 0 symbol: open
  auto res = simulate_transient(default_pair(), {drive, std::nullopt},
                                loads2(1000), kDt,
                                {sched, std::nullopt});
  // flyback at the 0-slot boundaries stays outside the detection windows
  ReceiverParams rp;
  rp.threshold_v = 0.4 * detection_window_peak(res.terminal_voltage[1], 1e-9,
                                               frame.symbols.size());
  CHECK(detect_ternary(res.terminal_voltage[1], rp, 1e-9,
                       frame.symbols.size()) == frame.symbols);
}

TEST_CASE("noise determinism and statistics") {
  Waveform base;
  base.dt_s = kDt;
  base.samples = Eigen::ArrayXd::Zero(1000000);

  CHECK((add_noise(base, {0.0, 9}).samples - base.samples).abs().maxCoeff() ==
        0.0);

  Waveform a = add_noise(base, {0.01, 1234});
  Waveform b = add_noise(base, {0.01, 1234});
  CHECK((a.samples - b.samples).abs().maxCoeff() == 0.0);
  Waveform c = add_noise(base, {0.01, 1235});
  CHECK((a.samples - c.samples).abs().maxCoeff() > 0.0);

  // sample mean within 5 sigma / sqrt(N)
  const double mean = a.samples.mean();
  CHECK(std::abs(mean) < 5 * 0.01 / std::sqrt(1e6));
  // sample variance close to sigma^2
  const double var = (a.samples - mean).square().mean();
  CHECK(var == doctest::Approx(1e-4).epsilon(0.01));
}

TEST_CASE("shunt capacitance loads the receiver") {
  CouplingNetwork net = default_pair();
  net.shunt_c_f = Eigen::VectorXd::Zero(2);
  net.shunt_c_f(1) = 50e-15;  // 50 fF across the RX load
  HBridgeParams hb;
  Bits payload = parse_bits("101");
  TernaryFrame frame = encode_ternary(payload);
  Waveform drive =
      synthesize_drive(frame.symbols, hb, kDt, DriveMode::ReturnToZero);
  auto with_c = simulate_transient(net, {drive, std::nullopt}, loads2(1000),
                                   kDt);
  auto without =
      simulate_transient(default_pair(), {drive, std::nullopt}, loads2(1000),
                         kDt);
  const double peak_c = with_c.terminal_voltage[1].samples.abs().maxCoeff();
  const double peak = without.terminal_voltage[1].samples.abs().maxCoeff();
  CHECK(peak_c > 0);
  // the parallel L-C reshapes the pulse (here: resonant peaking)
  CHECK(std::abs(peak_c - peak) / peak > 1e-3);
  ReceiverParams rp;
  rp.threshold_v = 0.4 * peak_c;
  CHECK(detect_ternary(with_c.terminal_voltage[1], rp, 1e-9,
                       frame.symbols.size()) == frame.symbols);
}
