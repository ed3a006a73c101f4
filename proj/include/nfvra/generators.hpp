#pragma once

// Stochastic construction of substrates and request streams. Everything is a
// deterministic function of (config, seed); each concern draws from its own
// named sub-stream of the seed.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include "nfvra/config.hpp"
#include "nfvra/graphml.hpp"
#include "nfvra/network.hpp"
#include "nfvra/random.hpp"

namespace nfvra {

inline constexpr int kMaxResampleAttempts = 100;

namespace detail {

// Adds the shortest link between the component of node 0 and any other
// component until the graph is connected.
inline void connect_by_nearest(std::size_t n, const std::vector<Point>& pos,
                               std::vector<Link>& links) {
  for (;;) {
    Adjacency adj(n);
    for (const auto& l : links) {
      adj[l.u].push_back(l.v);
      adj[l.v].push_back(l.u);
    }
    auto comp = connected_components(adj);
    if (std::all_of(comp.begin(), comp.end(), [](int c) { return c == 0; })) return;
    double best = std::numeric_limits<double>::infinity();
    Link pick{};
    for (std::size_t a = 0; a < n; ++a) {
      if (comp[a] != 0) continue;
      for (std::size_t b = 0; b < n; ++b) {
        if (comp[b] == 0) continue;
        double d = pos.empty() ? double(a + b)
                               : std::hypot(pos[a].x - pos[b].x, pos[a].y - pos[b].y);
        if (d < best) {
          best = d;
          pick = {NodeId(std::min(a, b)), NodeId(std::max(a, b))};
        }
      }
    }
    links.push_back(pick);
  }
}

}  // namespace detail

// Waxman random geometric graph on the unit square: link (u, v) is drawn
// with probability alpha * exp(-d(u, v) / (beta * L)), L the largest
// pairwise distance. Disconnected samples are redrawn with seed + attempt;
// after kMaxResampleAttempts the last sample is joined by nearest pairs.
inline std::shared_ptr<Topology> generate_waxman_topology(int n, double alpha, double beta,
                                                          std::uint64_t seed) {
  if (n < 2) throw ConfigError("pn.topology.num_nodes", "Waxman graph needs n >= 2");
  if (!(alpha > 0 && alpha <= 1)) throw ConfigError("pn.topology.alpha", "must be in (0, 1]");
  if (!(beta > 0 && beta <= 1)) throw ConfigError("pn.topology.beta", "must be in (0, 1]");

  const std::size_t count = std::size_t(n);
  std::vector<Point> pos(count);
  std::vector<Link> links;
  for (int attempt = 0; attempt < kMaxResampleAttempts; ++attempt) {
    Rng rng = make_stream(seed, "topology", std::uint64_t(attempt));
    for (auto& p : pos) {
      p.x = uniform01(rng);
      p.y = uniform01(rng);
    }
    double longest = 0.0;
    for (std::size_t a = 0; a < count; ++a)
      for (std::size_t b = a + 1; b < count; ++b)
        longest = std::max(longest, std::hypot(pos[a].x - pos[b].x, pos[a].y - pos[b].y));
    if (longest <= 0.0) longest = 1.0;
    links.clear();
    for (std::size_t a = 0; a < count; ++a)
      for (std::size_t b = a + 1; b < count; ++b) {
        const double d = std::hypot(pos[a].x - pos[b].x, pos[a].y - pos[b].y);
        if (uniform01(rng) < alpha * std::exp(-d / (beta * longest)))
          links.push_back({NodeId(a), NodeId(b)});
      }
    Topology probe(count, links);
    if (probe.connected()) return std::make_shared<Topology>(count, links, pos);
  }
  detail::connect_by_nearest(count, pos, links);
  return std::make_shared<Topology>(count, links, pos);
}

// Erdos-Renyi G(n, p), redrawn until connected; as a last resort consecutive
// components are chained through their lowest-numbered nodes.
inline std::vector<Link> generate_connected_er(int n, double p, Rng& rng) {
  std::vector<Link> links;
  for (int attempt = 0; attempt < kMaxResampleAttempts; ++attempt) {
    links.clear();
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        if (uniform01(rng) < p) links.push_back({a, b});
    Adjacency adj(static_cast<std::size_t>(n));
    for (const auto& l : links) {
      adj[l.u].push_back(l.v);
      adj[l.v].push_back(l.u);
    }
    if (is_connected(adj)) return links;
  }
  Adjacency adj(static_cast<std::size_t>(n));
  for (const auto& l : links) {
    adj[l.u].push_back(l.v);
    adj[l.v].push_back(l.u);
  }
  auto comp = connected_components(adj);
  std::vector<int> representative;
  for (int v = 0; v < n; ++v)
    if (comp[v] == int(representative.size())) representative.push_back(v);
  for (std::size_t c = 1; c < representative.size(); ++c)
    links.push_back({representative[c - 1], representative[c]});
  return links;
}

// Draws capacities for every node/link of `skeleton`. Attribute values that
// came with the topology file take precedence over the distribution.
inline PhysicalNetwork apply_resource_specs(std::shared_ptr<const Topology> skeleton,
                                            const std::vector<ResourceSpec>& specs,
                                            std::uint64_t seed,
                                            std::optional<EnergySpec> energy = std::nullopt) {
  if (specs.empty()) throw ConfigError("pn", "no resource specs given");
  const std::size_t n = skeleton->node_count();
  const std::size_t m = skeleton->link_count();
  PhysicalAttributes attrs;
  bool bandwidth_seen = false;

  auto from_file = [](const std::map<std::string, std::vector<double>>& table,
                      const std::string& name, std::size_t i) -> std::optional<double> {
    auto it = table.find(name);
    if (it == table.end() || i >= it->second.size() || std::isnan(it->second[i]))
      return std::nullopt;
    return it->second[i];
  };

  for (const auto& spec : specs) {
    if (spec.level == ResourceLevel::node) {
      if (spec.name == "bandwidth" || spec.name == "latency" || spec.name == "latency_limit")
        throw ConfigError("pn.node_attrs_setting",
                          "'" + spec.name + "' is a link-level attribute");
      Rng rng = make_stream(seed, "pn_node_" + spec.name);
      std::vector<double> cap(n);
      for (std::size_t v = 0; v < n; ++v) {
        const double drawn = spec.distribution.sample(rng);
        cap[v] = from_file(skeleton->node_attributes(), spec.name, v).value_or(drawn);
      }
      attrs.node_kinds.push_back(spec.name);
      attrs.node_capacity.push_back(std::move(cap));
    } else {
      if (spec.name != "bandwidth" && spec.name != "latency")
        throw ConfigError("pn.link_attrs_setting",
                          "'" + spec.name + "' is not a physical link attribute");
      Rng rng = make_stream(seed, "pn_link_" + spec.name);
      std::vector<double> values(m);
      for (std::size_t l = 0; l < m; ++l) {
        const double drawn = spec.distribution.sample(rng);
        values[l] = from_file(skeleton->link_attributes(), spec.name, l).value_or(drawn);
      }
      if (spec.name == "bandwidth") {
        attrs.link_capacity = std::move(values);
        bandwidth_seen = true;
      } else {
        attrs.link_latency = std::move(values);
      }
    }
  }
  if (!bandwidth_seen) throw ConfigError("pn.link_attrs_setting", "missing 'bandwidth'");
  if (energy) {
    attrs.energy = NodeEnergy{std::vector<double>(n, energy->p_idle),
                              std::vector<double>(n, energy->p_peak)};
  }
  return PhysicalNetwork(std::move(skeleton), std::move(attrs));
}

inline std::uint64_t substrate_seed(const SimulationConfig& cfg, std::uint64_t run_seed) {
  return cfg.topology.seed.value_or(run_seed);
}

inline std::shared_ptr<const Topology> build_topology(const SimulationConfig& cfg,
                                                      std::uint64_t run_seed) {
  if (cfg.topology.kind == TopologySource::Kind::file)
    return load_topology_file(cfg.topology.path);
  return generate_waxman_topology(cfg.topology.num_nodes, cfg.topology.alpha,
                                  cfg.topology.beta, substrate_seed(cfg, run_seed));
}

// Fresh substrate at full availability.
inline PhysicalNetwork build_physical_network(const SimulationConfig& raw,
                                              std::uint64_t run_seed) {
  const SimulationConfig cfg = resolve_scenario(raw);
  return apply_resource_specs(build_topology(cfg, run_seed), cfg.pn_resources,
                              substrate_seed(cfg, run_seed), cfg.energy);
}

// Same capacities as build_physical_network, reusing an existing topology.
inline PhysicalNetwork build_physical_network(const SimulationConfig& raw,
                                              std::shared_ptr<const Topology> topo,
                                              std::uint64_t run_seed) {
  const SimulationConfig cfg = resolve_scenario(raw);
  return apply_resource_specs(std::move(topo), cfg.pn_resources, substrate_seed(cfg, run_seed),
                              cfg.energy);
}

struct RequestShape {
  SizeRange size;
  std::vector<ResourceSpec> resources;
  int phase = 0;
};

// Size range and demand specs in force for request `index`.
inline RequestShape request_shape(const SimulationConfig& cfg, int index) {
  RequestShape shape{cfg.vn_size, cfg.vn_resources, 0};
  for (std::size_t p = 0; p < cfg.phases.size(); ++p) {
    if (cfg.phases[p].start > index) break;
    shape = {cfg.vn_size, cfg.vn_resources, int(p) + 1};
    const auto& phase = cfg.phases[p];
    if (phase.size) shape.size = *phase.size;
    for (const auto& over : phase.resources) {
      auto it = std::find_if(shape.resources.begin(), shape.resources.end(),
                             [&](const ResourceSpec& s) {
                               return s.name == over.name && s.level == over.level;
                             });
      if (it != shape.resources.end())
        *it = over;
      else
        shape.resources.push_back(over);
    }
  }
  return shape;
}

// One request drawn from the per-index sub-streams (arrival/lifetime not set).
inline VirtualNetworkRequest generate_request(const SimulationConfig& cfg, std::uint64_t seed,
                                             int index) {
  const RequestShape shape = request_shape(cfg, index);
  VirtualNetworkRequest vn;
  vn.id = index;
  vn.phase = shape.phase;

  Rng topo_rng = make_stream(seed, "vn_topology", std::uint64_t(index));
  const int n = std::uniform_int_distribution<int>(shape.size.low, shape.size.high)(topo_rng);
  vn.node_count = std::size_t(n);
  vn.links = generate_connected_er(n, cfg.vn_edge_prob, topo_rng);

  Rng demand_rng = make_stream(seed, "vn_demands", std::uint64_t(index));
  for (const auto& spec : shape.resources) {
    if (spec.level != ResourceLevel::node) continue;
    if (spec.name == "bandwidth" || spec.name == "latency" || spec.name == "latency_limit")
      throw ConfigError("vn.node_attrs_setting", "'" + spec.name + "' is a link-level attribute");
    std::vector<double> row(vn.node_count);
    for (auto& d : row) d = spec.distribution.sample(demand_rng);
    vn.node_kinds.push_back(spec.name);
    vn.node_demand.push_back(std::move(row));
  }
  for (const auto& spec : shape.resources) {
    if (spec.level != ResourceLevel::link) continue;
    std::vector<double> row(vn.links.size());
    for (auto& d : row) d = spec.distribution.sample(demand_rng);
    if (spec.name == "bandwidth")
      vn.link_demand = std::move(row);
    else if (spec.name == "latency_limit")
      vn.latency_limit = std::move(row);
    else
      throw ConfigError("vn.link_attrs_setting",
                        "'" + spec.name + "' is not a virtual link attribute");
  }
  if (vn.link_demand.size() != vn.links.size())
    throw ConfigError("vn.link_attrs_setting", "missing 'bandwidth'");
  return vn;
}

// vn_count requests with Poisson arrivals (exponential gaps, mean 1/rate)
// and exponential lifetimes, sorted by arrival time.
inline std::vector<VirtualNetworkRequest> generate_request_sequence(const SimulationConfig& raw,
                                                                   std::uint64_t seed) {
  const SimulationConfig cfg = resolve_scenario(raw);
  validate(cfg);
  std::vector<VirtualNetworkRequest> out;
  out.reserve(std::size_t(cfg.vn_count));
  Rng arrivals = make_stream(seed, "arrivals");
  Rng lifetimes = make_stream(seed, "lifetimes");
  std::exponential_distribution<double> gap(cfg.arrival_rate);
  std::exponential_distribution<double> life(1.0 / cfg.lifetime_mean);
  double clock = 0.0;
  for (int i = 0; i < cfg.vn_count; ++i) {
    VirtualNetworkRequest vn = generate_request(cfg, seed, i);
    clock += gap(arrivals);
    vn.arrival_time = clock;
    double lt = life(lifetimes);
    while (!(lt > 0.0)) lt = life(lifetimes);
    vn.lifetime = lt;
    out.push_back(std::move(vn));
  }
  return out;
}

// The four-phase fluctuating-demand schedule: node/link demand ranges
// [0,30]/[0,75], then [0,40]/[0,100], then sizes [2,15], then [2,20],
// 250 requests each.
inline std::vector<DemandPhase> fluctuating_demand_phases(int phase_length = 250) {
  auto node = [](double hi) { return ResourceSpec{"cpu", ResourceLevel::node, Distribution::uniform(0, hi)}; };
  auto link = [](double hi) {
    return ResourceSpec{"bandwidth", ResourceLevel::link, Distribution::uniform(0, hi)};
  };
  return {DemandPhase{0, std::nullopt, {node(30), link(75)}},
          DemandPhase{phase_length, std::nullopt, {node(40), link(100)}},
          DemandPhase{2 * phase_length, SizeRange{2, 15}, {}},
          DemandPhase{3 * phase_length, SizeRange{2, 20}, {}}};
}

}  // namespace nfvra
