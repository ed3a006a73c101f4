#pragma once

#include <deque>
#include <functional>
#include <optional>
#include <vector>

#include "nfvra/solvers/ranking.hpp"

namespace nfvra {

struct RwBfsConfig {
  int hop_budget = 2;    // max hops between a node's host and its BFS parent's host
  int max_retries = 50;  // dead ends plus rejected complete mappings
};

// Physical nodes ranked by RW; virtual nodes visited breadth-first from the
// top-ranked virtual node (neighbours in rank order). Each placement is the
// best-ranked feasible unused node within the hop budget of the parent's
// host; dead ends backtrack to the previous decision.
inline Solution solve_rw_bfs(const Instance& in, const RwBfsConfig& cfg = {}) {
  const auto& vn = in.vn;
  const auto& pn = in.pn;
  const auto physical_rank = rank_nodes(RankKind::rw, physical_view(pn));
  const auto virtual_scores = rank_scores(RankKind::rw, virtual_view(vn));
  const auto virtual_rank = ranking_from_scores(virtual_scores);
  std::vector<int> vpos(vn.node_count);
  for (std::size_t i = 0; i < virtual_rank.size(); ++i) vpos[virtual_rank[i]] = int(i);

  const auto adj = vn.adjacency();
  std::vector<NodeId> visit, parent(vn.node_count, kUnmapped);
  std::vector<char> seen(vn.node_count, 0);
  std::deque<NodeId> queue{virtual_rank.front()};
  seen[virtual_rank.front()] = 1;
  while (!queue.empty()) {
    const NodeId v = queue.front();
    queue.pop_front();
    visit.push_back(v);
    auto nbrs = adj[v];
    std::sort(nbrs.begin(), nbrs.end(), [&](NodeId a, NodeId b) { return vpos[a] < vpos[b]; });
    for (NodeId w : nbrs)
      if (!seen[w]) {
        seen[w] = 1;
        parent[w] = v;
        queue.push_back(w);
      }
  }

  const EmbeddingOrder order = embedding_order(vn);
  std::vector<std::vector<double>> demand(vn.node_count);
  for (std::size_t v = 0; v < vn.node_count; ++v) demand[v] = demand_vector(pn, vn, NodeId(v));

  std::vector<NodeId> mapping(vn.node_count, kUnmapped);
  std::vector<char> used(pn.node_count(), 0);
  int retries = 0;
  std::optional<Solution> last_failure;
  FailureReason reason = FailureReason::node_resource;

  // Returns a feasible solution, or nullopt when the subtree is exhausted or
  // the retry budget is spent.
  std::function<std::optional<Solution>(std::size_t)> place = [&](std::size_t depth)
      -> std::optional<Solution> {
    if (retries > cfg.max_retries) return std::nullopt;
    if (depth == visit.size()) {
      Solution s = complete_mapping(in, mapping, order);
      if (s.feasible) return s;
      ++retries;
      last_failure = s;
      return std::nullopt;
    }
    const NodeId v = visit[depth];
    std::vector<int> dist;
    if (parent[v] != kUnmapped) dist = bfs_distances(pn.topology().adjacency(), mapping[parent[v]]);
    bool any = false;
    for (NodeId p : physical_rank) {
      if (used[p] || !fits_node(pn, demand[v], p)) continue;
      if (!dist.empty() && dist[p] > cfg.hop_budget) continue;
      any = true;
      mapping[v] = p;
      used[p] = 1;
      auto found = place(depth + 1);
      used[p] = 0;
      mapping[v] = kUnmapped;
      if (found) return found;
      if (retries > cfg.max_retries) return std::nullopt;
    }
    if (!any) {
      ++retries;
      if (!last_failure) reason = FailureReason::node_resource;
    }
    return std::nullopt;
  };

  if (auto found = place(0)) return *found;
  if (last_failure) return *last_failure;
  return infeasible(vn, reason);
}

class RwBfsSolver : public Solver {
 public:
  explicit RwBfsSolver(RwBfsConfig cfg = {}) : cfg_(cfg) {}
  std::string name() const override { return "rw_bfs"; }
  Solution solve(const Instance& in) const override { return solve_rw_bfs(in, cfg_); }

 private:
  RwBfsConfig cfg_;
};

}  // namespace nfvra
