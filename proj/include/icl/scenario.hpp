// Scenario configuration: one JSON document describing payload, line codes,
// channel source, electrical parameters, and coil roles.  Loading fills
// every default and validates every component invariant; the normalized
// echo makes the effective configuration explicit.
#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "icl/codec.hpp"
#include "icl/geometry.hpp"
#include "icl/magnetics.hpp"
#include "icl/sim.hpp"

namespace icl {

using json = nlohmann::ordered_json;

enum class LineCode { Nrz, Biphase, Ternary };

std::string to_string(LineCode code);
LineCode line_code_from_string(const std::string& name);

struct PayloadSpec {
  std::optional<Bits> bits;  // explicit payload
  std::size_t prbs_length = 0;
  uint64_t prbs_seed = 1;

  Bits materialize() const {
    return bits ? *bits : prbs_bits(prbs_length, prbs_seed);
  }
};

// Stacked-link array: `links` vertical channels, each one TX coil with its
// RX coil one layer above; link i sits at lateral offset i * lateral_offset
// and base height i * 2 * vertical.
struct ArraySpec {
  int links = 2;
  double lateral_offset_um = 10.0;
  double vertical_um = 106.0;
};

struct GeometryChannel {
  CoilGeometry coil;
  std::optional<ArraySpec> array;        // generator form
  std::vector<CoilPlacement> placements; // explicit form (array absent)
  std::optional<double> resistance_per_coil_ohm;
  double resistance_per_um_ohm = 0.02;
  double shunt_c_f = 0.0;

  std::vector<CoilSpec> coils() const;
};

struct TouchstoneChannel {
  std::string file;
  std::vector<std::string> port_roles;  // "drive"|"rx"|"victim"|"idle" per port
  std::optional<double> extract_hz;     // default: geometric mean of range
};

struct Roles {
  int drive = 0;
  int rx = 1;
  std::optional<int> victim;
};

struct ReceiverSpec {
  double load_ohm = 1000.0;
  double threshold_fraction = 0.4;      // of the clean calibration peak
  std::optional<double> threshold_v;    // explicit override
  double hysteresis_v = 0.0;
};

struct NoiseSpec {
  double sigma_v = 0.0;
  uint64_t seed = 42;
  std::size_t trials = 0;  // 0 = no BER estimate in reports
};

struct Scenario {
  PayloadSpec payload;
  std::vector<LineCode> codes;
  std::variant<GeometryChannel, TouchstoneChannel> channel;
  HBridgeParams bridge;
  ReceiverSpec receiver;
  NoiseSpec noise;
  double dt_s = 5e-12;
  Roles roles;
  int nrz_idle_level = -1;

  std::size_t coil_count() const;
  void validate() const;
};

Scenario scenario_from_json(const json& doc);
Scenario load_scenario(const std::string& path);
json normalized_scenario(const Scenario& s);

// The shipped default: Table I coil, two stacked links 10 um apart, paper
// payload, all three codes.
json default_scenario_json();

}  // namespace icl
