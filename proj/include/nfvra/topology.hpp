#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <queue>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "nfvra/errors.hpp"
#include "nfvra/graph_metrics.hpp"

namespace nfvra {

using NodeId = int;
using LinkId = int;

// Undirected link, stored with u < v.
struct Link {
  NodeId u = 0;
  NodeId v = 0;

  friend bool operator==(const Link&, const Link&) = default;
};

struct Neighbor {
  NodeId node;
  LinkId link;
};

// A simple path as its node sequence plus the traversed link ids.
struct Path {
  std::vector<NodeId> nodes;
  std::vector<LinkId> links;

  std::size_t hops() const { return links.size(); }
  friend bool operator==(const Path&, const Path&) = default;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct StaticCentralities {
  std::vector<double> degree;
  std::vector<double> closeness;
  std::vector<double> betweenness;
  std::vector<double> eigenvector;
};

class Topology;
std::vector<Path> k_shortest_paths(const Topology& topo, NodeId src, NodeId dst,
                                   std::size_t k);

// Immutable undirected simple graph. Shared between a physical network and
// all of its snapshots; caches topology-only derived data (k-shortest path
// candidates, centralities), which is safe because the graph never changes.
class Topology {
 public:
  Topology(std::size_t node_count, std::vector<Link> links,
           std::vector<Point> positions = {})
      : node_count_(node_count), positions_(std::move(positions)) {
    adjacency_.resize(node_count);
    links_.reserve(links.size());
    for (Link l : links) {
      if (l.u == l.v) throw ValidationError("self-loop on node " + std::to_string(l.u));
      if (l.u < 0 || l.v < 0 || std::size_t(l.u) >= node_count ||
          std::size_t(l.v) >= node_count)
        throw ValidationError("link endpoint out of range");
      if (l.u > l.v) std::swap(l.u, l.v);
      if (index_.count(key(l.u, l.v)))
        throw ValidationError("parallel link " + std::to_string(l.u) + "-" +
                              std::to_string(l.v));
      const LinkId id = LinkId(links_.size());
      index_.emplace(key(l.u, l.v), id);
      links_.push_back(l);
      adjacency_[l.u].push_back({l.v, id});
      adjacency_[l.v].push_back({l.u, id});
    }
    for (auto& row : adjacency_)
      std::sort(row.begin(), row.end(),
                [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
    plain_.resize(node_count);
    for (std::size_t v = 0; v < node_count; ++v)
      for (const auto& nb : adjacency_[v]) plain_[v].push_back(nb.node);
  }

  Topology(const Topology& other)
      : node_count_(other.node_count_),
        links_(other.links_),
        adjacency_(other.adjacency_),
        plain_(other.plain_),
        index_(other.index_),
        positions_(other.positions_),
        node_attrs_(other.node_attrs_),
        link_attrs_(other.link_attrs_) {}
  Topology& operator=(const Topology&) = delete;

  std::size_t node_count() const { return node_count_; }
  std::size_t link_count() const { return links_.size(); }
  const std::vector<Link>& links() const { return links_; }
  const Link& link(LinkId id) const { return links_[id]; }
  std::span<const Neighbor> neighbors(NodeId v) const { return adjacency_[v]; }
  const Adjacency& adjacency() const { return plain_; }
  const std::vector<Point>& positions() const { return positions_; }

  std::optional<LinkId> link_between(NodeId a, NodeId b) const {
    if (a > b) std::swap(a, b);
    auto it = index_.find(key(a, b));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  bool connected() const { return is_connected(plain_); }

  // Density 2|E| / (n (n-1)).
  double density() const {
    if (node_count_ < 2) return 0.0;
    return 2.0 * double(links_.size()) / (double(node_count_) * double(node_count_ - 1));
  }

  // Per-element attribute values carried by the source file (NaN = absent).
  const std::map<std::string, std::vector<double>>& node_attributes() const {
    return node_attrs_;
  }
  const std::map<std::string, std::vector<double>>& link_attributes() const {
    return link_attrs_;
  }
  void set_node_attribute(const std::string& name, std::vector<double> values) {
    node_attrs_[name] = std::move(values);
  }
  void set_link_attribute(const std::string& name, std::vector<double> values) {
    link_attrs_[name] = std::move(values);
  }

  // Cached k_shortest_paths(src, dst, k). The returned list may hold more
  // than k paths when a larger k was requested earlier; callers consider
  // only the first k (the enumeration is prefix-consistent).
  std::shared_ptr<const std::vector<Path>> candidate_paths(NodeId src, NodeId dst,
                                                           std::size_t k) const {
    const std::uint64_t id = key(src, dst);
    {
      std::shared_lock lock(cache_->mutex);
      auto it = cache_->paths.find(id);
      if (it != cache_->paths.end() &&
          (it->second.k >= k || it->second.paths->size() < it->second.k))
        return it->second.paths;
    }
    auto computed =
        std::make_shared<const std::vector<Path>>(k_shortest_paths(*this, src, dst, k));
    std::unique_lock lock(cache_->mutex);
    auto& slot = cache_->paths[id];
    if (!slot.paths || slot.k < k) slot = {k, computed};
    return slot.paths;
  }

  const StaticCentralities& centralities() const {
    std::call_once(cache_->centrality_once, [this] {
      cache_->centrality.degree = degree_centrality(plain_);
      cache_->centrality.closeness = closeness_centrality(plain_);
      cache_->centrality.betweenness = betweenness_centrality(plain_);
      cache_->centrality.eigenvector = eigenvector_centrality(plain_);
    });
    return cache_->centrality;
  }

 private:
  std::uint64_t key(NodeId a, NodeId b) const {
    return std::uint64_t(a) * std::uint64_t(node_count_ + 1) + std::uint64_t(b);
  }

  struct CachedPaths {
    std::size_t k = 0;
    std::shared_ptr<const std::vector<Path>> paths;
  };
  struct Caches {
    std::shared_mutex mutex;
    std::unordered_map<std::uint64_t, CachedPaths> paths;
    std::once_flag centrality_once;
    StaticCentralities centrality;
  };

  std::size_t node_count_;
  std::vector<Link> links_;
  std::vector<std::vector<Neighbor>> adjacency_;
  Adjacency plain_;
  std::unordered_map<std::uint64_t, LinkId> index_;
  std::vector<Point> positions_;
  std::map<std::string, std::vector<double>> node_attrs_;
  std::map<std::string, std::vector<double>> link_attrs_;
  std::unique_ptr<Caches> cache_ = std::make_unique<Caches>();
};

// Up to k loop-free src->dst paths in increasing (hop count, node sequence)
// order. Best-first search over partial paths keyed by (exact remaining hop
// distance in the graph minus the partial path's nodes, node sequence); the
// key is a consistent lower bound and every queued partial path has a
// completion, so complete paths leave the queue in exactly the target order.
inline std::vector<Path> k_shortest_paths(const Topology& topo, NodeId src, NodeId dst,
                                          std::size_t k) {
  std::vector<Path> out;
  const std::size_t n = topo.node_count();
  if (k == 0 || src == dst || src < 0 || dst < 0 || std::size_t(src) >= n ||
      std::size_t(dst) >= n)
    return out;

  std::vector<char> blocked(n, 0);
  std::vector<int> dist(n);
  std::vector<NodeId> queue(n);
  // Hop distance to dst for every node, avoiding `blocked`.
  auto distances_to_dst = [&] {
    std::fill(dist.begin(), dist.end(), kUnreachable);
    std::size_t head = 0, tail = 0;
    dist[dst] = 0;
    queue[tail++] = dst;
    while (head < tail) {
      NodeId u = queue[head++];
      for (const auto& nb : topo.neighbors(u)) {
        if (blocked[nb.node] || dist[nb.node] != kUnreachable) continue;
        dist[nb.node] = dist[u] + 1;
        queue[tail++] = nb.node;
      }
    }
  };

  struct Partial {
    std::size_t bound;
    std::vector<NodeId> nodes;
  };
  auto later = [](const Partial& a, const Partial& b) {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.nodes > b.nodes;
  };
  std::priority_queue<Partial, std::vector<Partial>, decltype(later)> open(later);

  distances_to_dst();
  if (dist[src] == kUnreachable) return out;
  open.push({std::size_t(dist[src]), {src}});

  while (!open.empty() && out.size() < k) {
    Partial p = open.top();
    open.pop();
    const NodeId last = p.nodes.back();
    if (last == dst) {
      Path path;
      path.nodes = std::move(p.nodes);
      for (std::size_t i = 0; i + 1 < path.nodes.size(); ++i)
        path.links.push_back(*topo.link_between(path.nodes[i], path.nodes[i + 1]));
      out.push_back(std::move(path));
      continue;
    }
    std::fill(blocked.begin(), blocked.end(), 0);
    for (NodeId v : p.nodes) blocked[v] = 1;
    distances_to_dst();
    const std::size_t walked = p.nodes.size();  // hops after stepping once more
    for (const auto& nb : topo.neighbors(last)) {
      if (blocked[nb.node] || dist[nb.node] == kUnreachable) continue;
      Partial child{walked + std::size_t(dist[nb.node]), p.nodes};
      child.nodes.push_back(nb.node);
      open.push(std::move(child));
    }
  }
  return out;
}

}  // namespace nfvra
