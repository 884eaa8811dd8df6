// Experiment orchestration: encode -> synthesize -> simulate -> detect ->
// decode -> metrics, plus multi-code comparison and parameter sweeps.
#pragma once

#include "icl/metrics.hpp"
#include "icl/scenario.hpp"

namespace icl {

struct ExperimentOutput {
  LinkReport report;
  Bits payload;
  Waveform drive;            // bridge voltage at the driven coil
  Waveform tx_current;       // driven coil current
  Waveform rx_voltage;       // intended receiver terminal voltage (clean)
  std::optional<Waveform> victim_voltage;
  double threshold_v = 0.0;  // calibrated detector threshold
};

// Builds the coupling network from whichever channel source the scenario
// names (Neumann magnetics or Touchstone extraction).
CouplingNetwork build_channel(const Scenario& s);

// Full pipeline for one line code.  A prebuilt network can be passed so
// comparisons share one channel build.
ExperimentOutput run_experiment(const Scenario& s, LineCode code,
                                const CouplingNetwork* prebuilt = nullptr);

struct Comparison {
  std::string channel_fingerprint;
  std::vector<ExperimentOutput> runs;  // in scenario code order
  std::optional<double> ternary_over_nrz_energy;
  std::optional<double> ternary_over_nrz_duration;
};

// Runs every code of the scenario over a single channel build.
Comparison compare(const Scenario& s);

struct SweepRow {
  double value;
  Comparison result;
};

// Re-runs the comparison with the numeric field at `param_path` (dotted,
// e.g. "channel.geometry.array.lateral_offset_um") set to each value.
std::vector<SweepRow> sweep(const json& raw_scenario,
                            const std::string& param_path,
                            const std::vector<double>& values);

// Report serialization with frozen field order; CSV numbers carry 17
// significant digits for golden-file stability.
json report_json(const LinkReport& r);
std::string report_csv_header();
std::string report_csv_row(const LinkReport& r);
json comparison_json(const Comparison& c);
std::string comparison_csv(const Comparison& c);
json sweep_json(const std::string& param_path,
                const std::vector<SweepRow>& rows);
std::string sweep_csv(const std::string& param_path,
                      const std::vector<SweepRow>& rows);

}  // namespace icl
