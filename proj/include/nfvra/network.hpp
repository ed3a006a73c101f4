#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nfvra/errors.hpp"
#include "nfvra/topology.hpp"

namespace nfvra {

// Absolute slack for capacity comparisons on real-valued resources.
inline constexpr double kResourceEpsilon = 1e-9;

struct NodeEnergy {
  std::vector<double> p_idle;  // watts, per node
  std::vector<double> p_peak;
};

// Immutable resource attributes of a physical network.
struct PhysicalAttributes {
  std::vector<std::string> node_kinds;
  std::vector<std::vector<double>> node_capacity;  // [kind][node]
  std::vector<double> link_capacity;               // bandwidth, per link
  std::vector<double> link_latency;                // ms per link; empty if not modeled
  std::optional<NodeEnergy> energy;
};

// Substrate network: shared immutable topology and capacities plus mutable
// usage. Copying yields an independent snapshot (usage is copied; the
// immutable parts are shared).
class PhysicalNetwork {
 public:
  PhysicalNetwork(std::shared_ptr<const Topology> topo, PhysicalAttributes attrs)
      : topo_(std::move(topo)),
        attrs_(std::make_shared<const PhysicalAttributes>(std::move(attrs))) {
    const auto n = topo_->node_count();
    const auto m = topo_->link_count();
    if (attrs_->node_kinds.empty()) throw ConfigError("pn.node_attrs_setting", "no node resource");
    if (attrs_->node_capacity.size() != attrs_->node_kinds.size())
      throw ValidationError("node capacity table does not match resource kinds");
    for (const auto& row : attrs_->node_capacity) {
      if (row.size() != n) throw ValidationError("node capacity row has wrong length");
      for (double c : row)
        if (!(c >= 0.0)) throw ValidationError("negative or NaN node capacity");
    }
    if (attrs_->link_capacity.size() != m)
      throw ValidationError("link capacity vector has wrong length");
    for (double c : attrs_->link_capacity)
      if (!(c >= 0.0)) throw ValidationError("negative or NaN link capacity");
    if (!attrs_->link_latency.empty() && attrs_->link_latency.size() != m)
      throw ValidationError("link latency vector has wrong length");
    node_used_.assign(attrs_->node_kinds.size(), std::vector<double>(n, 0.0));
    node_load_.assign(n, 0);
    link_used_.assign(m, 0.0);
    link_load_.assign(m, 0);
  }

  const Topology& topology() const { return *topo_; }
  const std::shared_ptr<const Topology>& topology_ptr() const { return topo_; }
  const PhysicalAttributes& attributes() const { return *attrs_; }

  std::size_t node_count() const { return topo_->node_count(); }
  std::size_t link_count() const { return topo_->link_count(); }

  const std::vector<std::string>& node_kinds() const { return attrs_->node_kinds; }
  std::optional<std::size_t> kind_index(std::string_view name) const {
    const auto& kinds = attrs_->node_kinds;
    auto it = std::find(kinds.begin(), kinds.end(), name);
    if (it == kinds.end()) return std::nullopt;
    return std::size_t(it - kinds.begin());
  }

  double node_capacity(std::size_t kind, NodeId n) const {
    return attrs_->node_capacity[kind][n];
  }
  double node_used(std::size_t kind, NodeId n) const { return node_used_[kind][n]; }
  double node_available(std::size_t kind, NodeId n) const {
    return attrs_->node_capacity[kind][n] - node_used_[kind][n];
  }
  double link_capacity(LinkId l) const { return attrs_->link_capacity[l]; }
  double link_used(LinkId l) const { return link_used_[l]; }
  double link_available(LinkId l) const { return attrs_->link_capacity[l] - link_used_[l]; }

  bool has_latency() const { return !attrs_->link_latency.empty(); }
  double link_latency(LinkId l) const { return has_latency() ? attrs_->link_latency[l] : 0.0; }

  // Number of live reservations touching the element.
  int node_load(NodeId n) const { return node_load_[n]; }
  int link_load(LinkId l) const { return link_load_[l]; }

  // Sum over node kinds of available / capacity of node n.
  double node_available_total(NodeId n) const {
    double s = 0.0;
    for (std::size_t k = 0; k < node_used_.size(); ++k) s += node_available(k, n);
    return s;
  }

  // Low-level reservation primitives. `demand` is indexed by this network's
  // node kinds. Usage snaps back to exactly zero when the last reservation
  // on an element is freed, so long runs restore capacities bit-exactly.
  void reserve_node(NodeId n, std::span<const double> demand) {
    for (std::size_t k = 0; k < demand.size(); ++k) node_used_[k][n] += demand[k];
    ++node_load_[n];
  }
  void free_node(NodeId n, std::span<const double> demand) {
    if (node_load_[n] <= 0) throw StateError("free_node on node without reservations");
    if (--node_load_[n] == 0) {
      for (auto& row : node_used_) row[n] = 0.0;
    } else {
      for (std::size_t k = 0; k < demand.size(); ++k) node_used_[k][n] -= demand[k];
    }
  }
  void reserve_link(LinkId l, double bandwidth) {
    link_used_[l] += bandwidth;
    ++link_load_[l];
  }
  void free_link(LinkId l, double bandwidth) {
    if (link_load_[l] <= 0) throw StateError("free_link on link without reservations");
    if (--link_load_[l] == 0)
      link_used_[l] = 0.0;
    else
      link_used_[l] -= bandwidth;
  }

  bool is_active(int request_id) const { return active_.count(request_id) > 0; }
  const std::set<int>& active_requests() const { return active_; }
  void mark_active(int request_id) {
    if (!active_.insert(request_id).second)
      throw StateError("request " + std::to_string(request_id) + " already allocated");
  }
  void mark_inactive(int request_id) {
    if (active_.erase(request_id) == 0)
      throw StateError("request " + std::to_string(request_id) + " is not allocated");
  }

  // True when every element is back to its full capacity.
  bool pristine() const {
    for (const auto& row : node_used_)
      for (double u : row)
        if (u != 0.0) return false;
    for (double u : link_used_)
      if (u != 0.0) return false;
    return active_.empty();
  }

  double max_node_capacity(std::size_t kind) const {
    const auto& row = attrs_->node_capacity[kind];
    return row.empty() ? 0.0 : *std::max_element(row.begin(), row.end());
  }
  double max_link_capacity() const {
    const auto& row = attrs_->link_capacity;
    return row.empty() ? 0.0 : *std::max_element(row.begin(), row.end());
  }

 private:
  std::shared_ptr<const Topology> topo_;
  std::shared_ptr<const PhysicalAttributes> attrs_;
  std::vector<std::vector<double>> node_used_;
  std::vector<int> node_load_;
  std::vector<double> link_used_;
  std::vector<int> link_load_;
  std::set<int> active_;
};

struct VirtualNetworkRequest {
  int id = 0;
  std::size_t node_count = 0;
  std::vector<Link> links;
  std::vector<std::string> node_kinds;
  std::vector<std::vector<double>> node_demand;  // [kind][node]
  std::vector<double> link_demand;               // bandwidth per link
  std::vector<double> latency_limit;             // ms per link; empty if none
  double arrival_time = 0.0;
  double lifetime = 1.0;
  int phase = 0;  // generator phase the request was drawn in

  Adjacency adjacency() const {
    Adjacency adj(node_count);
    for (const auto& l : links) {
      adj[l.u].push_back(l.v);
      adj[l.v].push_back(l.u);
    }
    for (auto& row : adj) std::sort(row.begin(), row.end());
    return adj;
  }

  double total_node_demand(NodeId v) const {
    double s = 0.0;
    for (const auto& row : node_demand) s += row[v];
    return s;
  }

  bool has_latency_limits() const { return !latency_limit.empty(); }

  void validate() const {
    if (node_count < 2) throw ValidationError("virtual network needs at least 2 nodes");
    if (node_demand.size() != node_kinds.size() || node_kinds.empty())
      throw ValidationError("virtual node demand table does not match resource kinds");
    for (const auto& row : node_demand) {
      if (row.size() != node_count) throw ValidationError("demand row has wrong length");
      for (double d : row)
        if (!(d >= 0.0)) throw ValidationError("negative or NaN node demand");
    }
    if (link_demand.size() != links.size())
      throw ValidationError("link demand vector has wrong length");
    for (double d : link_demand)
      if (!(d >= 0.0)) throw ValidationError("negative or NaN link demand");
    if (!latency_limit.empty() && latency_limit.size() != links.size())
      throw ValidationError("latency limit vector has wrong length");
    if (!(arrival_time >= 0.0)) throw ValidationError("negative arrival time");
    if (!(lifetime > 0.0)) throw ValidationError("non-positive lifetime");
    if (!is_connected(adjacency())) throw ValidationError("virtual network is disconnected");
  }
};

// Index of each virtual resource kind inside the physical network's kinds.
inline std::vector<std::size_t> map_kinds(const PhysicalNetwork& pn,
                                          const VirtualNetworkRequest& vn) {
  std::vector<std::size_t> out;
  out.reserve(vn.node_kinds.size());
  for (const auto& name : vn.node_kinds) {
    auto idx = pn.kind_index(name);
    if (!idx) throw ConfigError("resource", "unknown resource kind '" + name + "'");
    out.push_back(*idx);
  }
  return out;
}

// Demand of virtual node v laid out over the physical network's kinds.
inline std::vector<double> demand_vector(const PhysicalNetwork& pn,
                                         const VirtualNetworkRequest& vn, NodeId v) {
  std::vector<double> out(pn.node_kinds().size(), 0.0);
  const auto kinds = map_kinds(pn, vn);
  for (std::size_t k = 0; k < kinds.size(); ++k) out[kinds[k]] += vn.node_demand[k][v];
  return out;
}

}  // namespace nfvra
