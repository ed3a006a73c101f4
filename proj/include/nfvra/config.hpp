#pragma once

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nfvra/errors.hpp"
#include "nfvra/random.hpp"

namespace nfvra {

using json = nlohmann::json;

inline constexpr int kConfigSchemaVersion = 1;

struct Distribution {
  enum class Kind { uniform, exponential, constant };
  Kind kind = Kind::constant;
  double low = 0.0;
  double high = 0.0;
  double mean = 1.0;
  double value = 0.0;

  static Distribution uniform(double lo, double hi) {
    return {Kind::uniform, lo, hi, 1.0, 0.0};
  }
  static Distribution exponential(double mean) { return {Kind::exponential, 0, 0, mean, 0}; }
  static Distribution constant(double v) { return {Kind::constant, 0, 0, 1.0, v}; }

  double sample(Rng& rng) const {
    switch (kind) {
      case Kind::uniform:
        return low == high ? low : std::uniform_real_distribution<double>(low, high)(rng);
      case Kind::exponential:
        return std::exponential_distribution<double>(1.0 / mean)(rng);
      case Kind::constant:
        return value;
    }
    return value;
  }

  // Inclusive bounds every sample satisfies.
  double min_value() const { return kind == Kind::uniform ? low : kind == Kind::constant ? value : 0.0; }
  double max_value() const {
    return kind == Kind::uniform ? high
           : kind == Kind::constant ? value
                                    : std::numeric_limits<double>::infinity();
  }
};

enum class ResourceLevel { node, link };

struct ResourceSpec {
  std::string name;
  ResourceLevel level = ResourceLevel::node;
  Distribution distribution;
};

struct SizeRange {
  int low = 2;
  int high = 10;
};

struct TopologySource {
  enum class Kind { waxman, file };
  Kind kind = Kind::waxman;
  int num_nodes = 100;
  double alpha = 0.5;
  double beta = 0.2;
  std::string path;
  std::string label = "waxman";
  // When set, topology and physical capacities are drawn from this seed
  // instead of the run seed, so the substrate stays fixed across runs.
  std::optional<std::uint64_t> seed;
};

struct EnergySpec {
  double p_idle = 100.0;  // watts
  double p_peak = 200.0;
};

struct Scenario {
  bool heterogeneous = false;
  bool latency_aware = false;
  bool energy_tracking = false;
};

// Override applied to requests whose index is >= start.
struct DemandPhase {
  int start = 0;
  std::optional<SizeRange> size;
  std::vector<ResourceSpec> resources;  // replace specs with the same name and level
};

struct SimulationConfig {
  int schema_version = kConfigSchemaVersion;
  TopologySource topology;
  std::vector<ResourceSpec> pn_resources;
  std::optional<EnergySpec> energy;

  int vn_count = 1000;
  SizeRange vn_size;
  double vn_edge_prob = 0.5;
  std::vector<ResourceSpec> vn_resources;
  std::vector<DemandPhase> phases;
  double arrival_rate = 0.14;
  double lifetime_mean = 500.0;

  Scenario scenario;
  std::uint64_t seed = 0;
  int k_paths = 10;
  std::optional<double> solver_time_limit;  // seconds of wall time per request
  bool debug_checks = false;
  json solvers = json::object();
};

inline constexpr double kDefaultLatencyLow = 1.0;
inline constexpr double kDefaultLatencyHigh = 50.0;
inline constexpr double kDefaultLatencyLimit = 100.0;

inline std::vector<ResourceSpec> default_pn_resources() {
  return {{"cpu", ResourceLevel::node, Distribution::uniform(50, 100)},
          {"bandwidth", ResourceLevel::link, Distribution::uniform(50, 100)}};
}

inline std::vector<ResourceSpec> default_vn_resources() {
  return {{"cpu", ResourceLevel::node, Distribution::uniform(0, 20)},
          {"bandwidth", ResourceLevel::link, Distribution::uniform(0, 50)}};
}

inline SimulationConfig default_config() {
  SimulationConfig cfg;
  cfg.pn_resources = default_pn_resources();
  cfg.vn_resources = default_vn_resources();
  return cfg;
}

// Waxman 100-node substrate: alpha 0.5, beta 0.2 puts the expected link
// count near 490 (density ~0.05). The topology seed is pinned so every run
// sees the same substrate and only the request stream varies with the seed.
inline SimulationConfig wx100_preset(double arrival_rate = 0.14) {
  SimulationConfig cfg = default_config();
  cfg.topology.kind = TopologySource::Kind::waxman;
  cfg.topology.num_nodes = 100;
  cfg.topology.alpha = 0.5;
  cfg.topology.beta = 0.2;
  cfg.topology.label = "wx100";
  cfg.topology.seed = 0;
  cfg.arrival_rate = arrival_rate;
  return cfg;
}

inline std::vector<std::string> preset_names() { return {"wx100", "wx100-s41"}; }

inline SimulationConfig preset_config(const std::string& name) {
  if (name == "wx100") return wx100_preset(0.14);
  if (name == "wx100-s41") return wx100_preset(0.16);
  throw ConfigError("topology", "unknown preset '" + name + "'");
}

namespace detail {

inline const ResourceSpec* find_spec(const std::vector<ResourceSpec>& specs,
                                     const std::string& name, ResourceLevel level) {
  for (const auto& s : specs)
    if (s.name == name && s.level == level) return &s;
  return nullptr;
}

inline void add_if_missing(std::vector<ResourceSpec>& specs, ResourceSpec spec) {
  if (!find_spec(specs, spec.name, spec.level)) specs.push_back(std::move(spec));
}

}  // namespace detail

// Applies scenario flags: heterogeneous adds "gpu" and "ram" node resources
// (same distribution as the first node resource), latency_aware adds link
// latency and virtual latency limits, energy_tracking adds default power
// figures. Explicit settings are never overwritten.
inline SimulationConfig resolve_scenario(SimulationConfig cfg) {
  auto first_node = [](const std::vector<ResourceSpec>& specs) -> const ResourceSpec* {
    for (const auto& s : specs)
      if (s.level == ResourceLevel::node) return &s;
    return nullptr;
  };
  if (cfg.scenario.heterogeneous) {
    for (auto* specs : {&cfg.pn_resources, &cfg.vn_resources}) {
      const ResourceSpec* base = first_node(*specs);
      if (!base) continue;
      Distribution d = base->distribution;
      detail::add_if_missing(*specs, {"gpu", ResourceLevel::node, d});
      detail::add_if_missing(*specs, {"ram", ResourceLevel::node, d});
    }
  }
  if (cfg.scenario.latency_aware) {
    detail::add_if_missing(cfg.pn_resources,
                           {"latency", ResourceLevel::link,
                            Distribution::uniform(kDefaultLatencyLow, kDefaultLatencyHigh)});
    detail::add_if_missing(cfg.vn_resources, {"latency_limit", ResourceLevel::link,
                                              Distribution::constant(kDefaultLatencyLimit)});
  }
  if (cfg.scenario.energy_tracking && !cfg.energy) cfg.energy = EnergySpec{};
  return cfg;
}

inline void validate_distribution(const Distribution& d, const std::string& field) {
  switch (d.kind) {
    case Distribution::Kind::uniform:
      if (!(d.low <= d.high)) throw ConfigError(field, "low must not exceed high");
      if (d.low < 0) throw ConfigError(field, "resource values must be non-negative");
      break;
    case Distribution::Kind::exponential:
      if (!(d.mean > 0)) throw ConfigError(field, "mean must be > 0");
      break;
    case Distribution::Kind::constant:
      if (!(d.value >= 0)) throw ConfigError(field, "value must be non-negative");
      break;
  }
}

inline void validate_specs(const std::vector<ResourceSpec>& specs, const std::string& prefix) {
  bool node = false, bandwidth = false;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& s = specs[i];
    const std::string field =
        prefix + (s.level == ResourceLevel::node ? ".node_attrs_setting[" : ".link_attrs_setting[") +
        std::to_string(i) + "]";
    if (s.name.empty()) throw ConfigError(field + ".name", "must not be empty");
    validate_distribution(s.distribution, field);
    if (s.level == ResourceLevel::node) node = true;
    if (s.level == ResourceLevel::link && s.name == "bandwidth") bandwidth = true;
    if (s.level == ResourceLevel::link && s.name != "bandwidth" && s.name != "latency" &&
        s.name != "latency_limit")
      throw ConfigError(field + ".name", "unsupported link attribute '" + s.name +
                                             "' (bandwidth, latency, latency_limit)");
  }
  if (!node) throw ConfigError(prefix + ".node_attrs_setting", "at least one node resource required");
  if (!bandwidth)
    throw ConfigError(prefix + ".link_attrs_setting", "a 'bandwidth' link resource is required");
}

inline void validate(const SimulationConfig& cfg) {
  if (cfg.schema_version != kConfigSchemaVersion)
    throw ConfigError("schema_version", "unsupported version " + std::to_string(cfg.schema_version));
  if (cfg.topology.kind == TopologySource::Kind::waxman) {
    if (cfg.topology.num_nodes < 2) throw ConfigError("pn.topology.num_nodes", "must be >= 2");
    if (!(cfg.topology.alpha > 0 && cfg.topology.alpha <= 1))
      throw ConfigError("pn.topology.alpha", "must be in (0, 1]");
    if (!(cfg.topology.beta > 0 && cfg.topology.beta <= 1))
      throw ConfigError("pn.topology.beta", "must be in (0, 1]");
  } else if (cfg.topology.path.empty()) {
    throw ConfigError("pn.topology.path", "file topology needs a path");
  }
  validate_specs(cfg.pn_resources, "pn");
  validate_specs(cfg.vn_resources, "vn");
  if (cfg.vn_count <= 0) throw ConfigError("vn.count", "must be > 0");
  if (cfg.vn_size.low < 2) throw ConfigError("vn.size.low", "must be >= 2");
  if (cfg.vn_size.low > cfg.vn_size.high) throw ConfigError("vn.size", "low must not exceed high");
  if (!(cfg.vn_edge_prob > 0 && cfg.vn_edge_prob <= 1))
    throw ConfigError("vn.edge_prob", "must be in (0, 1]");
  if (!(cfg.arrival_rate > 0)) throw ConfigError("vn.arrival_rate", "must be > 0");
  if (!(cfg.lifetime_mean > 0)) throw ConfigError("vn.lifetime_mean", "must be > 0");
  for (std::size_t i = 0; i < cfg.phases.size(); ++i) {
    const auto& p = cfg.phases[i];
    const std::string field = "vn.phases[" + std::to_string(i) + "]";
    if (p.start < 0) throw ConfigError(field + ".start", "must be >= 0");
    if (i > 0 && p.start < cfg.phases[i - 1].start)
      throw ConfigError(field + ".start", "phases must be sorted by start");
    if (p.size && (p.size->low < 2 || p.size->low > p.size->high))
      throw ConfigError(field + ".size", "invalid size range");
    for (const auto& s : p.resources) validate_distribution(s.distribution, field);
  }
  if (cfg.k_paths < 1) throw ConfigError("simulation.k_paths", "must be >= 1");
  if (cfg.solver_time_limit && !(*cfg.solver_time_limit > 0))
    throw ConfigError("simulation.solver_time_limit_s", "must be > 0");
  if (cfg.energy && !(cfg.energy->p_idle >= 0 && cfg.energy->p_peak >= cfg.energy->p_idle))
    throw ConfigError("pn.graph_attrs_setting.energy", "need 0 <= p_idle <= p_peak");
}

// ---------------------------------------------------------------------------
// JSON mapping

inline json to_json(const Distribution& d) {
  switch (d.kind) {
    case Distribution::Kind::uniform:
      return {{"distribution", "uniform"}, {"low", d.low}, {"high", d.high}};
    case Distribution::Kind::exponential:
      return {{"distribution", "exponential"}, {"mean", d.mean}};
    case Distribution::Kind::constant:
      return {{"distribution", "constant"}, {"value", d.value}};
  }
  return {};
}

namespace detail {

template <class T>
T get_field(const json& j, const char* key, const std::string& field, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(field + "." + key, std::string("wrong type: ") + e.what());
  }
}

inline Distribution distribution_from(const json& j, const std::string& field) {
  if (!j.is_object()) throw ConfigError(field, "expected an object");
  const auto kind = get_field<std::string>(j, "distribution", field, "uniform");
  if (kind == "uniform")
    return Distribution::uniform(get_field<double>(j, "low", field, 0.0),
                                 get_field<double>(j, "high", field, 0.0));
  if (kind == "exponential")
    return Distribution::exponential(get_field<double>(j, "mean", field, 0.0));
  if (kind == "constant") return Distribution::constant(get_field<double>(j, "value", field, 0.0));
  throw ConfigError(field + ".distribution", "unknown distribution '" + kind + "'");
}

inline std::vector<ResourceSpec> specs_from(const json& block, const std::string& field) {
  std::vector<ResourceSpec> out;
  for (const auto& [key, level] : {std::pair{"node_attrs_setting", ResourceLevel::node},
                                   std::pair{"link_attrs_setting", ResourceLevel::link}}) {
    if (!block.contains(key)) continue;
    const auto& list = block.at(key);
    const std::string lf = field + "." + key;
    if (!list.is_array()) throw ConfigError(lf, "expected a list");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string ef = lf + "[" + std::to_string(i) + "]";
      out.push_back({get_field<std::string>(list[i], "name", ef, ""), level,
                     distribution_from(list[i], ef)});
    }
  }
  return out;
}

inline void specs_to(json& block, const std::vector<ResourceSpec>& specs) {
  json nodes = json::array(), links = json::array();
  for (const auto& s : specs) {
    json e = to_json(s.distribution);
    e["name"] = s.name;
    (s.level == ResourceLevel::node ? nodes : links).push_back(e);
  }
  block["node_attrs_setting"] = nodes;
  block["link_attrs_setting"] = links;
}

inline SizeRange size_from(const json& j, const std::string& field) {
  return {get_field<int>(j, "low", field, 2), get_field<int>(j, "high", field, 10)};
}

}  // namespace detail

inline json to_json(const SimulationConfig& cfg) {
  json topo;
  if (cfg.topology.kind == TopologySource::Kind::waxman) {
    topo = {{"type", "waxman"}, {"num_nodes", cfg.topology.num_nodes},
            {"alpha", cfg.topology.alpha}, {"beta", cfg.topology.beta}};
  } else {
    topo = {{"type", "file"}, {"path", cfg.topology.path}};
  }
  topo["label"] = cfg.topology.label;
  topo["seed"] = cfg.topology.seed ? json(*cfg.topology.seed) : json(nullptr);

  json pn = {{"topology", topo}};
  detail::specs_to(pn, cfg.pn_resources);
  pn["graph_attrs_setting"] = json::object();
  if (cfg.energy)
    pn["graph_attrs_setting"]["energy"] = {{"p_idle", cfg.energy->p_idle},
                                           {"p_peak", cfg.energy->p_peak}};

  json vn = {{"count", cfg.vn_count},
             {"size", {{"low", cfg.vn_size.low}, {"high", cfg.vn_size.high}}},
             {"edge_prob", cfg.vn_edge_prob},
             {"arrival_rate", cfg.arrival_rate},
             {"lifetime_mean", cfg.lifetime_mean}};
  detail::specs_to(vn, cfg.vn_resources);
  vn["graph_attrs_setting"] = json::object();
  json phases = json::array();
  for (const auto& p : cfg.phases) {
    json e = {{"start", p.start}};
    if (p.size) e["size"] = {{"low", p.size->low}, {"high", p.size->high}};
    detail::specs_to(e, p.resources);
    phases.push_back(e);
  }
  vn["phases"] = phases;

  return {{"schema_version", cfg.schema_version},
          {"pn", pn},
          {"vn", vn},
          {"scenario",
           {{"heterogeneous", cfg.scenario.heterogeneous},
            {"latency_aware", cfg.scenario.latency_aware},
            {"energy_tracking", cfg.scenario.energy_tracking}}},
          {"simulation",
           {{"seed", cfg.seed},
            {"k_paths", cfg.k_paths},
            {"solver_time_limit_s",
             cfg.solver_time_limit ? json(*cfg.solver_time_limit) : json(nullptr)},
            {"debug_checks", cfg.debug_checks}}},
          {"solvers", cfg.solvers}};
}

// Missing blocks fall back to the defaults; present fields are type-checked
// and reported with their full path.
inline SimulationConfig config_from_json(const json& j) {
  using detail::get_field;
  if (!j.is_object()) throw ConfigError("", "config root must be an object");
  SimulationConfig cfg = default_config();
  cfg.schema_version = get_field<int>(j, "schema_version", "", kConfigSchemaVersion);

  if (j.contains("pn")) {
    const auto& pn = j.at("pn");
    if (pn.contains("preset")) {
      auto preset = preset_config(get_field<std::string>(pn, "preset", "pn", ""));
      cfg.topology = preset.topology;
    }
    if (pn.contains("topology")) {
      const auto& t = pn.at("topology");
      const std::string f = "pn.topology";
      const auto type = get_field<std::string>(t, "type", f, "waxman");
      if (type == "waxman") {
        cfg.topology.kind = TopologySource::Kind::waxman;
        cfg.topology.num_nodes = get_field<int>(t, "num_nodes", f, cfg.topology.num_nodes);
        cfg.topology.alpha = get_field<double>(t, "alpha", f, cfg.topology.alpha);
        cfg.topology.beta = get_field<double>(t, "beta", f, cfg.topology.beta);
      } else if (type == "file") {
        cfg.topology.kind = TopologySource::Kind::file;
        cfg.topology.path = get_field<std::string>(t, "path", f, "");
      } else {
        throw ConfigError(f + ".type", "unknown topology type '" + type + "'");
      }
      cfg.topology.label = get_field<std::string>(t, "label", f, type);
      if (t.contains("seed") && !t.at("seed").is_null())
        cfg.topology.seed = get_field<std::uint64_t>(t, "seed", f, 0);
    }
    if (pn.contains("node_attrs_setting") || pn.contains("link_attrs_setting"))
      cfg.pn_resources = detail::specs_from(pn, "pn");
    if (pn.contains("graph_attrs_setting") && pn.at("graph_attrs_setting").contains("energy")) {
      const auto& e = pn.at("graph_attrs_setting").at("energy");
      const std::string f = "pn.graph_attrs_setting.energy";
      cfg.energy = EnergySpec{get_field<double>(e, "p_idle", f, 100.0),
                              get_field<double>(e, "p_peak", f, 200.0)};
    }
  }
  if (j.contains("vn")) {
    const auto& vn = j.at("vn");
    cfg.vn_count = get_field<int>(vn, "count", "vn", cfg.vn_count);
    if (vn.contains("size")) cfg.vn_size = detail::size_from(vn.at("size"), "vn.size");
    cfg.vn_edge_prob = get_field<double>(vn, "edge_prob", "vn", cfg.vn_edge_prob);
    cfg.arrival_rate = get_field<double>(vn, "arrival_rate", "vn", cfg.arrival_rate);
    cfg.lifetime_mean = get_field<double>(vn, "lifetime_mean", "vn", cfg.lifetime_mean);
    if (vn.contains("node_attrs_setting") || vn.contains("link_attrs_setting"))
      cfg.vn_resources = detail::specs_from(vn, "vn");
    if (vn.contains("phases")) {
      const auto& list = vn.at("phases");
      if (!list.is_array()) throw ConfigError("vn.phases", "expected a list");
      for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string f = "vn.phases[" + std::to_string(i) + "]";
        DemandPhase p;
        p.start = get_field<int>(list[i], "start", f, 0);
        if (list[i].contains("size")) p.size = detail::size_from(list[i].at("size"), f + ".size");
        p.resources = detail::specs_from(list[i], f);
        cfg.phases.push_back(std::move(p));
      }
    }
  }
  if (j.contains("scenario")) {
    const auto& s = j.at("scenario");
    cfg.scenario.heterogeneous = get_field<bool>(s, "heterogeneous", "scenario", false);
    cfg.scenario.latency_aware = get_field<bool>(s, "latency_aware", "scenario", false);
    cfg.scenario.energy_tracking = get_field<bool>(s, "energy_tracking", "scenario", false);
  }
  if (j.contains("simulation")) {
    const auto& s = j.at("simulation");
    cfg.seed = get_field<std::uint64_t>(s, "seed", "simulation", cfg.seed);
    cfg.k_paths = get_field<int>(s, "k_paths", "simulation", cfg.k_paths);
    if (s.contains("solver_time_limit_s") && !s.at("solver_time_limit_s").is_null())
      cfg.solver_time_limit = get_field<double>(s, "solver_time_limit_s", "simulation", 0.0);
    cfg.debug_checks = get_field<bool>(s, "debug_checks", "simulation", false);
  }
  if (j.contains("solvers")) cfg.solvers = j.at("solvers");
  validate(cfg);
  return cfg;
}

inline SimulationConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", "'" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

// Stable 64-bit hex digest of the canonical config serialization.
inline std::string fingerprint(const SimulationConfig& cfg) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(to_json(cfg).dump());
  return os.str();
}

}  // namespace nfvra
