// Command-line front end: encode/decode payloads, tabulate coil networks,
// import S-parameter channels, and run simulate/compare/sweep experiments.
//
// Exit codes: 0 success, 1 validation/input error, 2 runtime/solver error.
#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "icl/magnetics.hpp"
#include "icl/runner.hpp"
#include "icl/touchstone.hpp"

using namespace icl;
namespace fs = std::filesystem;

namespace {

struct CommonOpts {
  std::string scenario_file;
  std::string out_dir = "out";
  std::string format = "json";
  int64_t seed = -1;  // <0 = keep scenario seeds
};

json load_raw_scenario(const CommonOpts& opts) {
  json doc;
  if (opts.scenario_file.empty()) {
    doc = json::object();
  } else {
    std::ifstream in(opts.scenario_file);
    if (!in)
      throw SchemaError("cannot open scenario file '" + opts.scenario_file +
                        "'");
    try {
      doc = json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw SchemaError("scenario '" + opts.scenario_file + "': " + e.what());
    }
  }
  if (opts.seed >= 0) {
    doc["noise"]["seed"] = opts.seed;
    if (doc.contains("payload") && doc["payload"].contains("prbs"))
      doc["payload"]["prbs"]["seed"] = opts.seed;
  }
  return doc;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeError("cannot write '" + path.string() + "'");
  out << content;
}

void write_run_outputs(const fs::path& dir, const ExperimentOutput& run,
                       const std::string& format) {
  const std::string& scheme = run.report.scheme;
  if (format == "csv") {
    write_file(dir / ("report_" + scheme + ".csv"),
               report_csv_header() + "\n" + report_csv_row(run.report) + "\n");
  } else {
    write_file(dir / ("report_" + scheme + ".json"),
               report_json(run.report).dump(2) + "\n");
  }
  write_file(dir / ("drive_" + scheme + ".csv"), waveform_csv(run.drive));
  write_file(dir / ("tx_current_" + scheme + ".csv"),
             waveform_csv(run.tx_current));
  write_file(dir / ("rx_voltage_" + scheme + ".csv"),
             waveform_csv(run.rx_voltage));
  if (run.victim_voltage)
    write_file(dir / ("victim_voltage_" + scheme + ".csv"),
               waveform_csv(*run.victim_voltage));
}

void print_report_line(const LinkReport& r) {
  std::cout << r.scheme << ": duration " << r.duration_s << " s, energy "
            << r.tx_energy_j << " J, "
            << (r.scheme == "nrz" ? "transitions " : "pulses ")
            << r.transitions_or_pulses << ", decoded "
            << (r.decoded_ok ? "ok" : "FAILED") << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"inductive-coupling link simulator and codec toolkit"};
  app.require_subcommand(1);
  CommonOpts common;

  // encode
  auto* encode_cmd = app.add_subcommand("encode", "bits -> symbol text");
  std::string code_name = "ternary";
  std::string bits_text;
  encode_cmd->add_option("--code", code_name, "nrz|biphase|ternary");
  encode_cmd->add_option("bits", bits_text, "payload bits ('0'/'1')")
      ->required();

  // decode
  auto* decode_cmd = app.add_subcommand("decode", "symbol text -> bits");
  std::string symbols_text;
  int64_t payload_bits = -1;
  decode_cmd->add_option("--code", code_name, "nrz|biphase|ternary");
  decode_cmd->add_option("symbols", symbols_text, "symbols ('-','0','+')")
      ->required();
  decode_cmd->add_option("--payload-bits", payload_bits,
                         "original bit count (ternary padding strip)");

  // coil
  auto* coil_cmd =
      app.add_subcommand("coil", "coil geometry -> R/L/M netlist table");
  coil_cmd->add_option("--scenario", common.scenario_file, "scenario file");
  double outer = 250, width = 1, spacing = 1, thickness = 1;
  double offset = 10, vertical = 106;
  int turns = 5, links = 2;
  coil_cmd->add_option("--outer-side-um", outer);
  coil_cmd->add_option("--turns", turns);
  coil_cmd->add_option("--trace-width-um", width);
  coil_cmd->add_option("--trace-spacing-um", spacing);
  coil_cmd->add_option("--trace-thickness-um", thickness);
  coil_cmd->add_option("--links", links, "stacked link count");
  coil_cmd->add_option("--lateral-offset-um", offset);
  coil_cmd->add_option("--vertical-um", vertical);

  // import-touchstone
  auto* import_cmd = app.add_subcommand(
      "import-touchstone", "Touchstone file -> diagnostics + netlist table");
  std::string ts_file;
  int ts_ports = 0;
  double extract_hz = 0, tol = 1e-6;
  import_cmd->add_option("--file", ts_file, ".sNp file")->required();
  import_cmd->add_option("--ports", ts_ports, "port count override");
  import_cmd->add_option("--extract-hz", extract_hz,
                         "extraction frequency (default: geometric mean)");
  import_cmd->add_option("--tol", tol, "reciprocity/passivity tolerance");

  // simulate / compare / sweep
  auto* sim_cmd = app.add_subcommand("simulate", "run one experiment");
  auto* cmp_cmd = app.add_subcommand("compare", "run all scenario codes");
  auto* sweep_cmd = app.add_subcommand("sweep", "parameter sweep");
  std::string sweep_param;
  std::vector<double> sweep_values;
  std::string sim_code;
  for (CLI::App* cmd : {sim_cmd, cmp_cmd, sweep_cmd}) {
    cmd->add_option("--scenario", common.scenario_file, "scenario file");
    cmd->add_option("--seed", common.seed, "override noise/PRBS seed");
    cmd->add_option("--out", common.out_dir, "output directory");
    cmd->add_option("--format", common.format, "json|csv")
        ->check(CLI::IsMember({"json", "csv"}));
  }
  sim_cmd->add_option("--code", sim_code, "run a single code");
  sweep_cmd->add_option("--param", sweep_param, "dotted scenario field path")
      ->required();
  sweep_cmd->add_option("--values", sweep_values, "comma-separated values")
      ->required()
      ->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (*encode_cmd) {
      const Bits bits = parse_bits(bits_text);
      switch (line_code_from_string(code_name)) {
        case LineCode::Ternary: {
          TernaryFrame frame = encode_ternary(bits);
          std::cout << format_symbols(frame.symbols) << "\n";
          break;
        }
        case LineCode::Nrz: {
          Levels levels = encode_nrz(bits);
          std::cout << format_symbols({levels.begin(), levels.end()}) << "\n";
          break;
        }
        case LineCode::Biphase: {
          Levels levels = encode_biphase(bits);
          std::cout << format_symbols({levels.begin(), levels.end()}) << "\n";
          break;
        }
      }
      return 0;
    }

    if (*decode_cmd) {
      const Symbols symbols = parse_symbols(symbols_text);
      if (line_code_from_string(code_name) == LineCode::Ternary) {
        TernaryFrame frame;
        frame.symbols = symbols;
        frame.payload_bits = payload_bits >= 0
                                 ? static_cast<std::size_t>(payload_bits)
                                 : 3 * (symbols.size() / 2);
        std::cout << format_bits(decode_ternary(frame)) << "\n";
      } else {
        Bits bits;
        for (int8_t s : symbols) {
          if (s == 0)
            throw ValidationError("level sequences use only '-'/'+'");
          bits.push_back(s > 0 ? 1 : 0);
        }
        std::cout << format_bits(bits) << "\n";
      }
      return 0;
    }

    if (*coil_cmd) {
      if (!common.scenario_file.empty()) {
        Scenario s = scenario_from_json(load_raw_scenario(common));
        std::cout << netlist_table(build_channel(s));
        return 0;
      }
      GeometryChannel chan;
      chan.coil = {outer, turns, width, spacing, thickness};
      chan.array = ArraySpec{links, offset, vertical};
      NetworkBuildOptions opts;
      std::cout << netlist_table(build_network(chan.coils(), opts));
      return 0;
    }

    if (*import_cmd) {
      std::ifstream in(ts_file);
      if (!in)
        throw ValidationError("cannot open Touchstone file '" + ts_file + "'");
      std::stringstream buffer;
      buffer << in.rdbuf();
      int hint = ts_ports;
      if (hint == 0) {
        const auto dot = ts_file.rfind(".s");
        if (dot != std::string::npos)
          hint = std::atoi(ts_file.c_str() + dot + 2);
      }
      TouchstoneData data = parse_touchstone(buffer.str(), hint);
      std::cout << diagnostics_table(check_reciprocity_passivity(data, tol));
      const double f =
          extract_hz > 0
              ? extract_hz
              : std::sqrt(data.frequencies_hz(0) *
                          data.frequencies_hz(data.frequencies_hz.size() - 1));
      std::cout << "# extracted at " << f << " Hz\n"
                << netlist_table(extract_network(data, f));
      return 0;
    }

    const json raw = load_raw_scenario(common);
    const fs::path dir(common.out_dir);
    fs::create_directories(dir);

    if (*sim_cmd) {
      if (!sim_code.empty()) {
        json adjusted = raw;
        adjusted["codes"] = json::array({sim_code});
        const Scenario s = scenario_from_json(adjusted);
        ExperimentOutput run = run_experiment(s, s.codes[0]);
        write_run_outputs(dir, run, common.format);
        write_file(dir / "scenario_normalized.json",
                   normalized_scenario(s).dump(2) + "\n");
        print_report_line(run.report);
        return 0;
      }
      const Scenario s = scenario_from_json(raw);
      write_file(dir / "scenario_normalized.json",
                 normalized_scenario(s).dump(2) + "\n");
      for (LineCode code : s.codes) {
        ExperimentOutput run = run_experiment(s, code);
        write_run_outputs(dir, run, common.format);
        print_report_line(run.report);
      }
      return 0;
    }

    if (*cmp_cmd) {
      const Scenario s = scenario_from_json(raw);
      Comparison cmp = compare(s);
      if (common.format == "csv")
        write_file(dir / "comparison.csv", comparison_csv(cmp));
      else
        write_file(dir / "comparison.json", comparison_json(cmp).dump(2) + "\n");
      write_file(dir / "scenario_normalized.json",
                 normalized_scenario(s).dump(2) + "\n");
      for (const ExperimentOutput& run : cmp.runs)
        print_report_line(run.report);
      if (cmp.ternary_over_nrz_energy)
        std::cout << "ternary/nrz energy ratio "
                  << *cmp.ternary_over_nrz_energy << " (reference 0.69)\n";
      if (cmp.ternary_over_nrz_duration)
        std::cout << "ternary/nrz duration ratio "
                  << *cmp.ternary_over_nrz_duration << "\n";
      return 0;
    }

    if (*sweep_cmd) {
      std::vector<SweepRow> rows = sweep(raw, sweep_param, sweep_values);
      if (common.format == "csv")
        write_file(dir / "sweep.csv", sweep_csv(sweep_param, rows));
      else
        write_file(dir / "sweep.json",
                   sweep_json(sweep_param, rows).dump(2) + "\n");
      for (const SweepRow& row : rows) {
        std::cout << sweep_param << " = " << row.value << "\n";
        for (const ExperimentOutput& run : row.result.runs)
          print_report_line(run.report);
      }
      return 0;
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const RuntimeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
