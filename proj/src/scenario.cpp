#include "icl/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace icl {

std::string to_string(LineCode code) {
  switch (code) {
    case LineCode::Nrz:
      return "nrz";
    case LineCode::Biphase:
      return "biphase";
    case LineCode::Ternary:
      return "ternary";
  }
  return "?";
}

LineCode line_code_from_string(const std::string& name) {
  if (name == "nrz") return LineCode::Nrz;
  if (name == "biphase") return LineCode::Biphase;
  if (name == "ternary") return LineCode::Ternary;
  throw SchemaError("unknown line code '" + name +
                    "' (expected nrz|biphase|ternary)");
}

namespace {

[[noreturn]] void bad_field(const std::string& path, const std::string& why) {
  throw SchemaError(path + ": " + why);
}

const json& object_at(const json& doc, const std::string& path) {
  if (!doc.is_object()) bad_field(path, "expected an object");
  return doc;
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) ok = true;
    if (!ok) bad_field(path + "." + key, "unknown field");
  }
}

double number_field(const json& obj, const std::string& path, const char* key,
                    double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (v.is_null()) return fallback;
  if (!v.is_number()) bad_field(path + "." + key, "expected a number");
  return v.get<double>();
}

std::optional<double> optional_number_field(const json& obj,
                                            const std::string& path,
                                            const char* key) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  const json& v = obj.at(key);
  if (!v.is_number()) bad_field(path + "." + key, "expected a number");
  return v.get<double>();
}

long long integer_field(const json& obj, const std::string& path,
                        const char* key, long long fallback) {
  if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) bad_field(path + "." + key, "expected an integer");
  return v.get<long long>();
}

bool bool_field(const json& obj, const std::string& path, const char* key,
                bool fallback) {
  if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) bad_field(path + "." + key, "expected a boolean");
  return v.get<bool>();
}

std::string string_field(const json& obj, const std::string& path,
                         const char* key, const std::string& fallback) {
  if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) bad_field(path + "." + key, "expected a string");
  return v.get<std::string>();
}

PayloadSpec parse_payload(const json& doc) {
  PayloadSpec spec;
  if (!doc.contains("payload")) {
    spec.bits = parse_bits("000001010011100101110111");
    return spec;
  }
  const json& p = object_at(doc.at("payload"), "payload");
  check_keys(p, "payload", {"bits", "prbs"});
  const bool has_bits = p.contains("bits") && !p.at("bits").is_null();
  const bool has_prbs = p.contains("prbs") && !p.at("prbs").is_null();
  if (has_bits == has_prbs)
    bad_field("payload", "exactly one of 'bits' or 'prbs' required");
  if (has_bits) {
    if (!p.at("bits").is_string()) bad_field("payload.bits", "expected a string");
    try {
      spec.bits = parse_bits(p.at("bits").get<std::string>());
    } catch (const ValidationError& e) {
      bad_field("payload.bits", e.what());
    }
  } else {
    const json& prbs = object_at(p.at("prbs"), "payload.prbs");
    check_keys(prbs, "payload.prbs", {"length", "seed"});
    const long long length = integer_field(prbs, "payload.prbs", "length", -1);
    if (length < 0) bad_field("payload.prbs.length", "required, must be >= 0");
    spec.prbs_length = static_cast<std::size_t>(length);
    spec.prbs_seed =
        static_cast<uint64_t>(integer_field(prbs, "payload.prbs", "seed", 1));
  }
  return spec;
}

CoilGeometry parse_coil(const json& g, const std::string& path) {
  CoilGeometry coil;
  check_keys(g, path,
             {"outer_side_um", "turns", "trace_width_um", "trace_spacing_um",
              "trace_thickness_um"});
  coil.outer_side_um = number_field(g, path, "outer_side_um", 250.0);
  coil.turns = static_cast<int>(integer_field(g, path, "turns", 5));
  coil.trace_width_um = number_field(g, path, "trace_width_um", 1.0);
  coil.trace_spacing_um = number_field(g, path, "trace_spacing_um", 1.0);
  coil.trace_thickness_um = number_field(g, path, "trace_thickness_um", 1.0);
  return coil;
}

GeometryChannel parse_geometry(const json& g) {
  GeometryChannel chan;
  check_keys(g, "channel.geometry",
             {"coil", "array", "placements", "resistance_per_um_ohm",
              "resistance_per_coil_ohm", "shunt_c_f"});
  if (g.contains("coil"))
    chan.coil =
        parse_coil(object_at(g.at("coil"), "channel.geometry.coil"),
                   "channel.geometry.coil");
  const bool has_array = g.contains("array") && !g.at("array").is_null();
  const bool has_placements =
      g.contains("placements") && !g.at("placements").is_null();
  if (has_array && has_placements)
    bad_field("channel.geometry", "give either 'array' or 'placements'");
  if (has_placements) {
    const json& list = g.at("placements");
    if (!list.is_array() || list.empty())
      bad_field("channel.geometry.placements", "expected a non-empty array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string path =
          "channel.geometry.placements[" + std::to_string(i) + "]";
      const json& p = object_at(list[i], path);
      check_keys(p, path, {"dx_um", "dy_um", "dz_um"});
      CoilPlacement place;
      place.dx_um = number_field(p, path, "dx_um", 0.0);
      place.dy_um = number_field(p, path, "dy_um", 0.0);
      place.dz_um = number_field(p, path, "dz_um", 0.0);
      chan.placements.push_back(place);
    }
  } else {
    ArraySpec array;
    if (has_array) {
      const json& a = object_at(g.at("array"), "channel.geometry.array");
      check_keys(a, "channel.geometry.array",
                 {"links", "lateral_offset_um", "vertical_um"});
      array.links =
          static_cast<int>(integer_field(a, "channel.geometry.array", "links", 2));
      array.lateral_offset_um =
          number_field(a, "channel.geometry.array", "lateral_offset_um", 10.0);
      array.vertical_um =
          number_field(a, "channel.geometry.array", "vertical_um", 106.0);
    }
    if (array.links < 1)
      bad_field("channel.geometry.array.links", "must be >= 1");
    chan.array = array;
  }
  chan.resistance_per_um_ohm =
      number_field(g, "channel.geometry", "resistance_per_um_ohm", 0.02);
  chan.resistance_per_coil_ohm = optional_number_field(
      g, "channel.geometry", "resistance_per_coil_ohm");
  chan.shunt_c_f = number_field(g, "channel.geometry", "shunt_c_f", 0.0);
  return chan;
}

TouchstoneChannel parse_touchstone_channel(const json& t) {
  TouchstoneChannel chan;
  check_keys(t, "channel.touchstone", {"file", "port_roles", "extract_hz"});
  chan.file = string_field(t, "channel.touchstone", "file", "");
  if (chan.file.empty()) bad_field("channel.touchstone.file", "required");
  if (!t.contains("port_roles") || !t.at("port_roles").is_array())
    bad_field("channel.touchstone.port_roles", "expected an array of roles");
  for (const json& r : t.at("port_roles")) {
    if (!r.is_string())
      bad_field("channel.touchstone.port_roles", "expected strings");
    chan.port_roles.push_back(r.get<std::string>());
  }
  chan.extract_hz =
      optional_number_field(t, "channel.touchstone", "extract_hz");
  return chan;
}

}  // namespace

std::vector<CoilSpec> GeometryChannel::coils() const {
  std::vector<CoilSpec> specs;
  if (array) {
    for (int link = 0; link < array->links; ++link)
      for (int layer = 0; layer < 2; ++layer) {
        CoilSpec spec;
        spec.geometry = coil;
        spec.placement.dx_um = link * array->lateral_offset_um;
        spec.placement.dz_um = (2 * link + layer) * array->vertical_um;
        specs.push_back(spec);
      }
  } else {
    for (const CoilPlacement& place : placements)
      specs.push_back({coil, place});
  }
  return specs;
}

std::size_t Scenario::coil_count() const {
  if (const auto* g = std::get_if<GeometryChannel>(&channel))
    return g->array ? 2 * static_cast<std::size_t>(g->array->links)
                    : g->placements.size();
  return std::get<TouchstoneChannel>(channel).port_roles.size();
}

void Scenario::validate() const {
  if (codes.empty()) throw ValidationError("codes: need at least one");
  std::set<LineCode> seen;
  for (LineCode c : codes)
    if (!seen.insert(c).second)
      throw ValidationError("codes: duplicate entry " + to_string(c));

  bridge.validate();
  if (dt_s <= 0) throw ValidationError("solver.dt_s must be > 0");
  if (dt_s > bridge.symbol_period_s / 200.0)
    throw ValidationError("solver.dt_s must be <= symbol_period / 200");

  if (receiver.load_ohm <= 0)
    throw ValidationError("receiver.load_ohm must be > 0");
  if (receiver.threshold_fraction <= 0 || receiver.threshold_fraction >= 1)
    throw ValidationError("receiver.threshold_fraction must be in (0, 1)");
  if (receiver.hysteresis_v < 0)
    throw ValidationError("receiver.hysteresis_v must be >= 0");
  if (receiver.threshold_v &&
      !(*receiver.threshold_v > receiver.hysteresis_v))
    throw ValidationError("receiver.threshold_v must exceed hysteresis");
  if (noise.sigma_v < 0) throw ValidationError("noise.sigma_v must be >= 0");

  const std::size_t n = coil_count();
  if (n < 2) throw ValidationError("channel must provide at least two coils");
  auto in_range = [n](int idx) {
    return idx >= 0 && static_cast<std::size_t>(idx) < n;
  };
  if (!in_range(roles.drive) || !in_range(roles.rx))
    throw ValidationError("roles reference coils outside the channel");
  if (roles.drive == roles.rx)
    throw ValidationError("drive and rx roles must differ");
  if (roles.victim) {
    if (!in_range(*roles.victim))
      throw ValidationError("victim role references a missing coil");
    if (*roles.victim == roles.drive || *roles.victim == roles.rx)
      throw ValidationError("victim coil must be passive and distinct");
  }

  if (const auto* g = std::get_if<GeometryChannel>(&channel)) {
    g->coil.validate();
    if (g->array) {
      if (g->array->vertical_um <= 0)
        throw GeometryError("array.vertical_um must be > 0");
    } else {
      for (const CoilPlacement& p : g->placements) p.validate();
    }
    if (g->resistance_per_um_ohm < 0 ||
        (g->resistance_per_coil_ohm && *g->resistance_per_coil_ohm < 0))
      throw ValidationError("coil resistance must be >= 0");
    if (g->shunt_c_f < 0) throw ValidationError("shunt_c_f must be >= 0");
  } else {
    const auto& t = std::get<TouchstoneChannel>(channel);
    int drives = 0, rxs = 0;
    for (const std::string& role : t.port_roles) {
      if (role == "drive")
        ++drives;
      else if (role == "rx")
        ++rxs;
      else if (role != "idle" && role != "victim")
        throw ValidationError("port role '" + role +
                              "' not one of drive|rx|victim|idle");
    }
    if (drives != 1 || rxs != 1)
      throw ValidationError(
          "touchstone port_roles need exactly one drive and one rx");
  }
}

Scenario scenario_from_json(const json& doc) {
  if (!doc.is_object()) throw SchemaError("scenario: expected a JSON object");
  check_keys(doc, "scenario",
             {"payload", "codes", "channel", "bridge", "receiver", "noise",
              "solver", "roles", "nrz_idle_level"});
  Scenario s;
  s.payload = parse_payload(doc);

  if (doc.contains("codes")) {
    const json& codes = doc.at("codes");
    if (!codes.is_array()) bad_field("codes", "expected an array");
    s.codes.clear();
    for (const json& c : codes) {
      if (!c.is_string()) bad_field("codes", "expected strings");
      s.codes.push_back(line_code_from_string(c.get<std::string>()));
    }
  } else {
    s.codes = {LineCode::Ternary, LineCode::Nrz, LineCode::Biphase};
  }

  if (doc.contains("channel")) {
    const json& chan = object_at(doc.at("channel"), "channel");
    check_keys(chan, "channel", {"geometry", "touchstone"});
    const bool has_geom =
        chan.contains("geometry") && !chan.at("geometry").is_null();
    const bool has_ts =
        chan.contains("touchstone") && !chan.at("touchstone").is_null();
    if (has_geom == has_ts)
      bad_field("channel", "exactly one of 'geometry' or 'touchstone'");
    if (has_geom)
      s.channel = parse_geometry(
          object_at(chan.at("geometry"), "channel.geometry"));
    else
      s.channel = parse_touchstone_channel(
          object_at(chan.at("touchstone"), "channel.touchstone"));
  } else {
    s.channel = GeometryChannel{.array = ArraySpec{}};
  }

  if (doc.contains("bridge")) {
    const json& b = object_at(doc.at("bridge"), "bridge");
    check_keys(b, "bridge",
               {"supply_v", "on_resistance_ohm", "edge_time_s",
                "symbol_period_s", "zero_high_z"});
    s.bridge.supply_voltage_v = number_field(b, "bridge", "supply_v", 1.0);
    s.bridge.on_resistance_ohm =
        number_field(b, "bridge", "on_resistance_ohm", 10.0);
    s.bridge.edge_time_s = number_field(b, "bridge", "edge_time_s", 0.1e-9);
    s.bridge.symbol_period_s =
        number_field(b, "bridge", "symbol_period_s", 1e-9);
    s.bridge.zero_high_z = bool_field(b, "bridge", "zero_high_z", false);
  }

  if (doc.contains("receiver")) {
    const json& r = object_at(doc.at("receiver"), "receiver");
    check_keys(r, "receiver",
               {"load_ohm", "threshold_fraction", "threshold_v",
                "hysteresis_v"});
    s.receiver.load_ohm = number_field(r, "receiver", "load_ohm", 1000.0);
    s.receiver.threshold_fraction =
        number_field(r, "receiver", "threshold_fraction", 0.4);
    s.receiver.threshold_v =
        optional_number_field(r, "receiver", "threshold_v");
    s.receiver.hysteresis_v = number_field(r, "receiver", "hysteresis_v", 0.0);
  }

  if (doc.contains("noise")) {
    const json& n = object_at(doc.at("noise"), "noise");
    check_keys(n, "noise", {"sigma_v", "seed", "trials"});
    s.noise.sigma_v = number_field(n, "noise", "sigma_v", 0.0);
    s.noise.seed = static_cast<uint64_t>(integer_field(n, "noise", "seed", 42));
    s.noise.trials =
        static_cast<std::size_t>(integer_field(n, "noise", "trials", 0));
  }

  if (doc.contains("solver")) {
    const json& solver = object_at(doc.at("solver"), "solver");
    check_keys(solver, "solver", {"dt_s"});
    s.dt_s = number_field(solver, "solver", "dt_s", 5e-12);
  }

  const std::size_t n = s.coil_count();
  s.roles.victim = n >= 4 ? std::optional<int>(3) : std::nullopt;
  if (doc.contains("roles")) {
    const json& r = object_at(doc.at("roles"), "roles");
    check_keys(r, "roles", {"drive", "rx", "victim"});
    s.roles.drive = static_cast<int>(integer_field(r, "roles", "drive", 0));
    s.roles.rx = static_cast<int>(integer_field(r, "roles", "rx", 1));
    if (r.contains("victim")) {
      if (r.at("victim").is_null())
        s.roles.victim.reset();
      else
        s.roles.victim =
            static_cast<int>(integer_field(r, "roles", "victim", 3));
    }
  }
  if (const auto* t = std::get_if<TouchstoneChannel>(&s.channel)) {
    // port roles define the assignment for S-parameter channels
    s.roles.victim.reset();
    for (std::size_t i = 0; i < t->port_roles.size(); ++i) {
      if (t->port_roles[i] == "drive") s.roles.drive = static_cast<int>(i);
      if (t->port_roles[i] == "rx") s.roles.rx = static_cast<int>(i);
      if (t->port_roles[i] == "victim") s.roles.victim = static_cast<int>(i);
    }
  }

  s.nrz_idle_level =
      static_cast<int>(integer_field(doc, "scenario", "nrz_idle_level", -1));
  if (s.nrz_idle_level != -1 && s.nrz_idle_level != 1)
    bad_field("nrz_idle_level", "must be -1 or +1");

  s.validate();
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open scenario file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("scenario '" + path + "': " + e.what());
  }
  return scenario_from_json(doc);
}

json normalized_scenario(const Scenario& s) {
  json doc;
  if (s.payload.bits) {
    doc["payload"] = {{"bits", format_bits(*s.payload.bits)}};
  } else {
    doc["payload"] = {{"prbs",
                       {{"length", s.payload.prbs_length},
                        {"seed", s.payload.prbs_seed}}}};
  }
  doc["codes"] = json::array();
  for (LineCode c : s.codes) doc["codes"].push_back(to_string(c));

  if (const auto* g = std::get_if<GeometryChannel>(&s.channel)) {
    json geom;
    geom["coil"] = {{"outer_side_um", g->coil.outer_side_um},
                    {"turns", g->coil.turns},
                    {"trace_width_um", g->coil.trace_width_um},
                    {"trace_spacing_um", g->coil.trace_spacing_um},
                    {"trace_thickness_um", g->coil.trace_thickness_um}};
    if (g->array) {
      geom["array"] = {{"links", g->array->links},
                       {"lateral_offset_um", g->array->lateral_offset_um},
                       {"vertical_um", g->array->vertical_um}};
    } else {
      geom["placements"] = json::array();
      for (const CoilPlacement& p : g->placements)
        geom["placements"].push_back(
            {{"dx_um", p.dx_um}, {"dy_um", p.dy_um}, {"dz_um", p.dz_um}});
    }
    geom["resistance_per_um_ohm"] = g->resistance_per_um_ohm;
    geom["resistance_per_coil_ohm"] =
        g->resistance_per_coil_ohm ? json(*g->resistance_per_coil_ohm)
                                   : json(nullptr);
    geom["shunt_c_f"] = g->shunt_c_f;
    doc["channel"] = {{"geometry", geom}};
  } else {
    const auto& t = std::get<TouchstoneChannel>(s.channel);
    doc["channel"] = {{"touchstone",
                       {{"file", t.file},
                        {"port_roles", t.port_roles},
                        {"extract_hz",
                         t.extract_hz ? json(*t.extract_hz) : json(nullptr)}}}};
  }

  doc["bridge"] = {{"supply_v", s.bridge.supply_voltage_v},
                   {"on_resistance_ohm", s.bridge.on_resistance_ohm},
                   {"edge_time_s", s.bridge.edge_time_s},
                   {"symbol_period_s", s.bridge.symbol_period_s},
                   {"zero_high_z", s.bridge.zero_high_z}};
  doc["receiver"] = {{"load_ohm", s.receiver.load_ohm},
                     {"threshold_fraction", s.receiver.threshold_fraction},
                     {"threshold_v", s.receiver.threshold_v
                                         ? json(*s.receiver.threshold_v)
                                         : json(nullptr)},
                     {"hysteresis_v", s.receiver.hysteresis_v}};
  doc["noise"] = {{"sigma_v", s.noise.sigma_v},
                  {"seed", s.noise.seed},
                  {"trials", s.noise.trials}};
  doc["solver"] = {{"dt_s", s.dt_s}};
  json roles = {{"drive", s.roles.drive}, {"rx", s.roles.rx}};
  roles["victim"] = s.roles.victim ? json(*s.roles.victim) : json(nullptr);
  doc["roles"] = roles;
  doc["nrz_idle_level"] = s.nrz_idle_level;
  return doc;
}

json default_scenario_json() {
  return normalized_scenario(scenario_from_json(json::object()));
}

}  // namespace icl
