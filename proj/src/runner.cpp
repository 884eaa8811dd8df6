#include "icl/runner.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "icl/touchstone.hpp"

namespace icl {

namespace {

constexpr double kOpenLoadOhm = 1e9;
constexpr double kReferenceEnergyRatio = 0.69;  // published ternary/NRZ figure

int ports_from_extension(const std::string& file) {
  const auto dot = file.rfind(".s");
  if (dot == std::string::npos) return 0;
  int ports = 0;
  for (std::size_t i = dot + 2; i < file.size() && file[i] != 'p'; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(file[i]))) return 0;
    ports = ports * 10 + (file[i] - '0');
  }
  return ports;
}

}  // namespace

CouplingNetwork build_channel(const Scenario& s) {
  if (const auto* g = std::get_if<GeometryChannel>(&s.channel)) {
    NetworkBuildOptions opts;
    opts.resistance_per_coil_ohm = g->resistance_per_coil_ohm;
    opts.resistance_per_um_ohm = g->resistance_per_um_ohm;
    if (g->shunt_c_f > 0) opts.shunt_c_f = g->shunt_c_f;
    return build_network(g->coils(), opts);
  }
  const auto& t = std::get<TouchstoneChannel>(s.channel);
  std::ifstream in(t.file);
  if (!in)
    throw ValidationError("cannot open Touchstone file '" + t.file + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  TouchstoneData data =
      parse_touchstone(buffer.str(), ports_from_extension(t.file));
  if (data.port_count != static_cast<int>(t.port_roles.size()))
    throw ValidationError("port_roles lists " +
                          std::to_string(t.port_roles.size()) +
                          " roles for a " + std::to_string(data.port_count) +
                          "-port file");
  const double f_lo = data.frequencies_hz(0);
  const double f_hi = data.frequencies_hz(data.frequencies_hz.size() - 1);
  const double f = t.extract_hz.value_or(std::sqrt(f_lo * f_hi));
  return extract_network(data, f);
}

ExperimentOutput run_experiment(const Scenario& s, LineCode code,
                                const CouplingNetwork* prebuilt) {
  s.validate();
  ExperimentOutput out;
  out.payload = s.payload.materialize();
  LinkReport& rep = out.report;
  rep.scheme = to_string(code);
  rep.bits = out.payload.size();

  // Encode.
  TernaryFrame frame;
  Levels levels;
  Symbols slot_values;
  DriveMode mode = DriveMode::ReturnToZero;
  switch (code) {
    case LineCode::Ternary:
      frame = encode_ternary(out.payload);
      slot_values = frame.symbols;
      break;
    case LineCode::Nrz:
      levels = encode_nrz(out.payload);
      slot_values.assign(levels.begin(), levels.end());
      mode = DriveMode::Hold;
      break;
    case LineCode::Biphase:
      levels = encode_biphase(out.payload);
      slot_values.assign(levels.begin(), levels.end());
      break;
  }
  rep.symbols = slot_values.size();
  rep.duration_s = static_cast<double>(rep.symbols) * s.bridge.symbol_period_s;
  rep.bits_per_symbol =
      rep.symbols ? static_cast<double>(rep.bits) / rep.symbols : 0.0;
  switch (code) {
    case LineCode::Ternary:
      rep.transitions_or_pulses = count_pulses(frame);
      break;
    case LineCode::Nrz:
      rep.transitions_or_pulses = count_transitions(levels, s.nrz_idle_level);
      break;
    case LineCode::Biphase:
      rep.transitions_or_pulses = levels.size();  // one pulse per bit
      break;
  }

  if (out.payload.empty()) {  // nothing on the wire
    rep.decoded_ok = true;
    return out;
  }

  // Channel and transient run.
  CouplingNetwork net = prebuilt ? *prebuilt : build_channel(s);
  const Eigen::Index n = net.size();
  out.drive = synthesize_drive(slot_values, s.bridge, s.dt_s, mode,
                               code == LineCode::Nrz ? s.nrz_idle_level : 0);
  std::vector<std::optional<Waveform>> drives(static_cast<std::size_t>(n));
  drives[static_cast<std::size_t>(s.roles.drive)] = out.drive;
  std::vector<std::optional<SeriesSchedule>> series(
      static_cast<std::size_t>(n));
  series[static_cast<std::size_t>(s.roles.drive)] =
      bridge_series_schedule(slot_values, s.bridge);
  Eigen::VectorXd loads = Eigen::VectorXd::Constant(n, kOpenLoadOhm);
  loads(s.roles.rx) = s.receiver.load_ohm;
  if (s.roles.victim) loads(*s.roles.victim) = s.receiver.load_ohm;

  TransientResult sim = simulate_transient(net, drives, loads, s.dt_s, series);
  out.tx_current = sim.coil_current[static_cast<std::size_t>(s.roles.drive)];
  out.rx_voltage =
      sim.terminal_voltage[static_cast<std::size_t>(s.roles.rx)];
  if (s.roles.victim)
    out.victim_voltage =
        sim.terminal_voltage[static_cast<std::size_t>(*s.roles.victim)];

  // Detector calibration: threshold as a fraction of the clean in-window
  // peak unless set explicitly.  Windows only, so out-of-window switching
  // artifacts (e.g. high-Z flyback at slot boundaries) do not skew it.
  const double clean_peak = detection_window_peak(
      out.rx_voltage, s.bridge.symbol_period_s, rep.symbols);
  out.threshold_v = s.receiver.threshold_v.value_or(
      s.receiver.threshold_fraction * clean_peak);
  ReceiverParams rx_params;
  rx_params.load_ohm = s.receiver.load_ohm;
  rx_params.threshold_v = out.threshold_v;
  rx_params.hysteresis_v = s.receiver.hysteresis_v;

  // Detection (with the scenario's noise realization, if any) and decode.
  Waveform detector_input = out.rx_voltage;
  if (s.noise.sigma_v > 0)
    detector_input = add_noise(out.rx_voltage,
                               {s.noise.sigma_v, s.noise.seed});
  switch (code) {
    case LineCode::Ternary: {
      const Symbols detected = detect_ternary(detector_input, rx_params,
                                              s.bridge.symbol_period_s,
                                              frame.symbols.size());
      rep.decoded_ok =
          detected == frame.symbols &&
          decode_ternary({detected, frame.payload_bits}) == out.payload;
      break;
    }
    case LineCode::Nrz:
      rep.decoded_ok = detect_nrz(detector_input, rx_params,
                                  s.bridge.symbol_period_s,
                                  out.payload.size(),
                                  s.nrz_idle_level) == out.payload;
      break;
    case LineCode::Biphase:
      rep.decoded_ok = detect_biphase(detector_input,
                                      s.bridge.symbol_period_s,
                                      out.payload.size()) == out.payload;
      break;
  }

  // Metrics.
  rep.tx_energy_j = tx_energy(out.drive, out.tx_current);
  if (out.victim_voltage) {
    CrosstalkMetrics xt = crosstalk_metrics(out.rx_voltage,
                                            *out.victim_voltage,
                                            s.receiver.load_ohm);
    rep.crosstalk_peak_ratio = xt.peak_ratio;
    rep.crosstalk_energy_j = xt.victim_energy_j;
  }
  if (s.noise.trials > 0) {
    PreparedLink link{rep.scheme, out.rx_voltage, out.payload, rx_params,
                      s.bridge.symbol_period_s, s.nrz_idle_level};
    BerEstimate ber = estimate_ber(link, s.noise.trials,
                                   {s.noise.sigma_v, s.noise.seed});
    rep.ber = ber.ber;
    rep.ber_ci_low = ber.ci.low;
    rep.ber_ci_high = ber.ci.high;
  }
  return out;
}

Comparison compare(const Scenario& s) {
  s.validate();
  if (s.codes.size() < 2)
    throw ValidationError("compare needs at least two line codes");
  Comparison cmp;
  const CouplingNetwork net = build_channel(s);
  cmp.channel_fingerprint = net.fingerprint();
  const LinkReport* ternary = nullptr;
  const LinkReport* nrz = nullptr;
  for (LineCode code : s.codes)
    cmp.runs.push_back(run_experiment(s, code, &net));
  for (const ExperimentOutput& run : cmp.runs) {
    if (run.report.scheme == "ternary") ternary = &run.report;
    if (run.report.scheme == "nrz") nrz = &run.report;
  }
  if (ternary && nrz && nrz->tx_energy_j != 0)
    cmp.ternary_over_nrz_energy = ternary->tx_energy_j / nrz->tx_energy_j;
  if (ternary && nrz && nrz->duration_s != 0)
    cmp.ternary_over_nrz_duration = ternary->duration_s / nrz->duration_s;
  return cmp;
}

std::vector<SweepRow> sweep(const json& raw_scenario,
                            const std::string& param_path,
                            const std::vector<double>& values) {
  // resolve the dotted path once to fail fast
  std::vector<std::string> keys;
  std::string segment;
  std::istringstream split(param_path);
  while (std::getline(split, segment, '.')) {
    if (segment.empty()) throw PathError("empty segment in '" + param_path + "'");
    keys.push_back(segment);
  }
  if (keys.empty()) throw PathError("empty parameter path");

  auto with_value = [&](double v) {
    json doc = raw_scenario;
    json* node = &doc;
    for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
      if (!node->is_object() || !node->contains(keys[i]))
        throw PathError("scenario has no field '" + keys[i] + "' in '" +
                        param_path + "'");
      node = &node->at(keys[i]);
    }
    if (!node->is_object() || !node->contains(keys.back()))
      throw PathError("scenario has no field '" + keys.back() + "' in '" +
                      param_path + "'");
    json& leaf = node->at(keys.back());
    if (!leaf.is_number() && !leaf.is_null())
      throw PathError("'" + param_path + "' is not a numeric field");
    leaf = v;
    return doc;
  };

  std::vector<SweepRow> rows;
  for (double v : values) {
    const Scenario s = scenario_from_json(with_value(v));
    SweepRow row;
    row.value = v;
    if (s.codes.size() >= 2) {
      row.result = compare(s);
    } else {
      const CouplingNetwork net = build_channel(s);
      row.result.channel_fingerprint = net.fingerprint();
      row.result.runs.push_back(run_experiment(s, s.codes[0], &net));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json opt_json(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

std::string opt_csv(const std::optional<double>& v) {
  return v ? g17(*v) : std::string();
}

}  // namespace

json report_json(const LinkReport& r) {
  json doc;
  doc["scheme"] = r.scheme;
  doc["duration_s"] = r.duration_s;
  doc["tx_energy_j"] = r.tx_energy_j;
  doc["transitions_or_pulses"] = r.transitions_or_pulses;
  doc["bits"] = r.bits;
  doc["symbols"] = r.symbols;
  doc["bits_per_symbol"] = r.bits_per_symbol;
  doc["crosstalk_peak_ratio"] = opt_json(r.crosstalk_peak_ratio);
  doc["crosstalk_energy_j"] = opt_json(r.crosstalk_energy_j);
  doc["ber"] = opt_json(r.ber);
  doc["ber_ci_low"] = opt_json(r.ber_ci_low);
  doc["ber_ci_high"] = opt_json(r.ber_ci_high);
  doc["decoded_ok"] = r.decoded_ok;
  return doc;
}

std::string report_csv_header() {
  return "scheme,duration_s,tx_energy_j,transitions_or_pulses,bits,symbols,"
         "bits_per_symbol,crosstalk_peak_ratio,crosstalk_energy_j,ber,"
         "ber_ci_low,ber_ci_high,decoded_ok";
}

std::string report_csv_row(const LinkReport& r) {
  std::string row = r.scheme;
  row += ',' + g17(r.duration_s);
  row += ',' + g17(r.tx_energy_j);
  row += ',' + std::to_string(r.transitions_or_pulses);
  row += ',' + std::to_string(r.bits);
  row += ',' + std::to_string(r.symbols);
  row += ',' + g17(r.bits_per_symbol);
  row += ',' + opt_csv(r.crosstalk_peak_ratio);
  row += ',' + opt_csv(r.crosstalk_energy_j);
  row += ',' + opt_csv(r.ber);
  row += ',' + opt_csv(r.ber_ci_low);
  row += ',' + opt_csv(r.ber_ci_high);
  row += r.decoded_ok ? ",true" : ",false";
  return row;
}

json comparison_json(const Comparison& c) {
  json doc;
  doc["channel_fingerprint"] = c.channel_fingerprint;
  doc["reports"] = json::array();
  for (const ExperimentOutput& run : c.runs)
    doc["reports"].push_back(report_json(run.report));
  doc["ratios"] = {
      {"ternary_over_nrz_energy", opt_json(c.ternary_over_nrz_energy)},
      {"ternary_over_nrz_duration", opt_json(c.ternary_over_nrz_duration)},
      {"reference_energy_ratio", kReferenceEnergyRatio}};
  return doc;
}

std::string comparison_csv(const Comparison& c) {
  std::string out = report_csv_header();
  out += '\n';
  for (const ExperimentOutput& run : c.runs) {
    out += report_csv_row(run.report);
    out += '\n';
  }
  if (c.ternary_over_nrz_energy && c.ternary_over_nrz_duration) {
    // ratio row: duration and energy columns carry ternary/NRZ ratios
    out += "ternary/nrz," + g17(*c.ternary_over_nrz_duration) + ',' +
           g17(*c.ternary_over_nrz_energy) + ",,,,,,,,,,\n";
  }
  return out;
}

json sweep_json(const std::string& param_path,
                const std::vector<SweepRow>& rows) {
  json doc;
  doc["parameter"] = param_path;
  doc["rows"] = json::array();
  for (const SweepRow& row : rows) {
    json entry;
    entry["value"] = row.value;
    entry["comparison"] = comparison_json(row.result);
    doc["rows"].push_back(entry);
  }
  return doc;
}

std::string sweep_csv(const std::string& param_path,
                      const std::vector<SweepRow>& rows) {
  std::string out = param_path + ',' + report_csv_header() + '\n';
  for (const SweepRow& row : rows)
    for (const ExperimentOutput& run : row.result.runs)
      out += g17(row.value) + ',' + report_csv_row(run.report) + '\n';
  return out;
}

}  // namespace icl
