#pragma once

// Node-ranking heuristics: score both graphs, place virtual nodes in rank
// order on the best-ranked feasible unused physical node, then route.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "nfvra/graph_metrics.hpp"
#include "nfvra/solvers/solver.hpp"

namespace nfvra {

enum class RankKind { grc, nrm, rw, nea, pl };

inline std::string_view to_string(RankKind k) {
  switch (k) {
    case RankKind::grc: return "grc";
    case RankKind::nrm: return "nrm";
    case RankKind::rw: return "rw";
    case RankKind::nea: return "nea";
    case RankKind::pl: return "pl";
  }
  return "?";
}

inline constexpr double kRankDamping = 0.85;
inline constexpr double kRankTolerance = 1e-6;
inline constexpr int kRankMaxIterations = 1000;

class RankNotConverged : public std::runtime_error {
 public:
  RankNotConverged(int iterations, double residual)
      : std::runtime_error("rank iteration did not converge after " + std::to_string(iterations) +
                           " iterations (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// Resource view of a graph: available resources for the substrate, demands
// for a request.
struct RankGraph {
  std::size_t n = 0;
  std::vector<Link> links;
  std::vector<double> link_weight;
  std::vector<double> node_weight;
  const StaticCentralities* centralities = nullptr;  // computed on demand when null
};

inline RankGraph physical_view(const PhysicalNetwork& pn) {
  RankGraph g;
  g.n = pn.node_count();
  g.links = pn.topology().links();
  g.link_weight.resize(g.links.size());
  for (std::size_t l = 0; l < g.links.size(); ++l)
    g.link_weight[l] = std::max(0.0, pn.link_available(LinkId(l)));
  g.node_weight.resize(g.n);
  for (std::size_t v = 0; v < g.n; ++v) g.node_weight[v] = std::max(0.0, pn.node_available_total(NodeId(v)));
  g.centralities = &pn.topology().centralities();
  return g;
}

inline RankGraph virtual_view(const VirtualNetworkRequest& vn) {
  RankGraph g;
  g.n = vn.node_count;
  g.links = vn.links;
  g.link_weight = vn.link_demand;
  g.node_weight.resize(g.n);
  for (std::size_t v = 0; v < g.n; ++v) g.node_weight[v] = vn.total_node_demand(NodeId(v));
  return g;
}

namespace detail {

inline std::vector<double> adjacent_bandwidth(const RankGraph& g) {
  std::vector<double> sum(g.n, 0.0);
  for (std::size_t l = 0; l < g.links.size(); ++l) {
    sum[g.links[l].u] += g.link_weight[l];
    sum[g.links[l].v] += g.link_weight[l];
  }
  return sum;
}

inline std::vector<double> to_distribution(std::vector<double> x) {
  const double total = std::accumulate(x.begin(), x.end(), 0.0);
  if (total > 0.0)
    for (auto& v : x) v /= total;
  else
    std::fill(x.begin(), x.end(), x.empty() ? 0.0 : 1.0 / double(x.size()));
  return x;
}

// r = (1-d)·teleport + d·M·r with M[u][v] = w(u,v) / Σ_x w(x,v). Nodes whose
// links all have zero weight spread their mass evenly over their neighbours.
inline std::vector<double> weighted_walk(const RankGraph& g, const std::vector<double>& teleport) {
  const std::size_t n = g.n;
  std::vector<double> out_weight(n, 0.0);
  std::vector<int> degree(n, 0);
  for (std::size_t l = 0; l < g.links.size(); ++l) {
    out_weight[g.links[l].u] += g.link_weight[l];
    out_weight[g.links[l].v] += g.link_weight[l];
    ++degree[g.links[l].u];
    ++degree[g.links[l].v];
  }
  std::vector<double> r = teleport, next(n);
  double residual = 0.0;
  for (int it = 0; it < kRankMaxIterations; ++it) {
    for (std::size_t v = 0; v < n; ++v) next[v] = (1.0 - kRankDamping) * teleport[v];
    for (std::size_t l = 0; l < g.links.size(); ++l) {
      const NodeId a = g.links[l].u, b = g.links[l].v;
      const double w = g.link_weight[l];
      // mass moving b -> a and a -> b
      next[a] += kRankDamping * r[b] * (out_weight[b] > 0.0 ? w / out_weight[b] : 1.0 / degree[b]);
      next[b] += kRankDamping * r[a] * (out_weight[a] > 0.0 ? w / out_weight[a] : 1.0 / degree[a]);
    }
    for (std::size_t v = 0; v < n; ++v)
      if (degree[v] == 0) next[v] += kRankDamping * r[v];
    residual = 0.0;
    for (std::size_t v = 0; v < n; ++v) residual += std::abs(next[v] - r[v]);
    r.swap(next);
    if (residual < kRankTolerance) return r;
  }
  throw RankNotConverged(kRankMaxIterations, residual);
}

}  // namespace detail

inline std::vector<double> rank_scores(RankKind kind, const RankGraph& g) {
  const auto bw = detail::adjacent_bandwidth(g);
  std::vector<double> h(g.n);
  for (std::size_t v = 0; v < g.n; ++v) h[v] = g.node_weight[v] * bw[v];
  switch (kind) {
    case RankKind::grc:
      return detail::weighted_walk(g, detail::to_distribution(g.node_weight));
    case RankKind::rw:
      return detail::weighted_walk(g, detail::to_distribution(h));
    case RankKind::nrm:
      return h;
    case RankKind::nea:
    case RankKind::pl: {
      StaticCentralities local;
      const StaticCentralities* c = g.centralities;
      if (!c) {
        Adjacency adj(g.n);
        for (const auto& l : g.links) {
          adj[l.u].push_back(l.v);
          adj[l.v].push_back(l.u);
        }
        if (kind == RankKind::nea)
          local.betweenness = betweenness_centrality(adj);
        else
          local.closeness = closeness_centrality(adj);
        c = &local;
      }
      for (std::size_t v = 0; v < g.n; ++v)
        h[v] *= kind == RankKind::nea ? 1.0 + c->betweenness[v] : c->closeness[v];
      return h;
    }
  }
  return h;
}

// Descending score, ties by id. Scores are compared after scaling by the
// maximum and rounding to 1e-9 so that summation noise cannot reorder nodes
// whose scores are mathematically equal.
inline std::vector<NodeId> ranking_from_scores(const std::vector<double>& scores) {
  double top = 0.0;
  for (double s : scores) top = std::max(top, std::abs(s));
  std::vector<long long> key(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i)
    key[i] = top > 0.0 ? std::llround(scores[i] / top * 1e9) : 0;
  std::vector<NodeId> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return key[a] > key[b]; });
  return order;
}

inline std::vector<NodeId> rank_nodes(RankKind kind, const RankGraph& g) {
  return ranking_from_scores(rank_scores(kind, g));
}

// Greedy placement in virtual rank order; fails on the first virtual node
// without a feasible host.
inline Solution solve_by_ranking(const Instance& in, RankKind kind) {
  const auto& vn = in.vn;
  const auto physical_rank = rank_nodes(kind, physical_view(in.pn));
  const auto virtual_rank = rank_nodes(kind, virtual_view(vn));
  std::vector<NodeId> mapping(vn.node_count, kUnmapped);
  std::vector<char> used(in.pn.node_count(), 0);
  for (NodeId v : virtual_rank) {
    const auto demand = demand_vector(in.pn, vn, v);
    for (NodeId p : physical_rank) {
      if (used[p] || !fits_node(in.pn, demand, p)) continue;
      mapping[v] = p;
      used[p] = 1;
      break;
    }
    if (mapping[v] == kUnmapped) return infeasible(vn, FailureReason::node_resource);
  }
  return complete_mapping(in, mapping, embedding_order(vn));
}

class RankingSolver : public Solver {
 public:
  explicit RankingSolver(RankKind kind) : kind_(kind) {}
  std::string name() const override { return std::string(to_string(kind_)) + "_rank"; }
  Solution solve(const Instance& in) const override { return solve_by_ranking(in, kind_); }

 private:
  RankKind kind_;
};

}  // namespace nfvra
