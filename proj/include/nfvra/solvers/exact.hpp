#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "nfvra/solvers/solver.hpp"

namespace nfvra {

struct ExactLimits {
  std::size_t max_virtual = 5;
  std::size_t max_physical = 15;
};

// Depth-first branch and bound over injective assignments in canonical
// order, routing each node's links as soon as both ends are placed (the
// same paths embed_mapping would produce for the full assignment). A
// partial assignment is pruned when REV / (node demand + cost of routed
// links + one hop for every unrouted link) cannot beat the incumbent.
inline Solution solve_exact(const Instance& in, const ExactLimits& limits = {}) {
  const auto& vn = in.vn;
  if (vn.node_count > limits.max_virtual || in.pn.node_count() > limits.max_physical)
    throw SolverRefused("exact solver limited to " + std::to_string(limits.max_virtual) +
                        " virtual and " + std::to_string(limits.max_physical) +
                        " physical nodes (got " + std::to_string(vn.node_count) + " and " +
                        std::to_string(in.pn.node_count()) + ")");
  const EmbeddingOrder order = embedding_order(vn);
  const std::size_t nv = vn.node_count, np = in.pn.node_count();
  std::vector<std::vector<double>> demand(nv);
  double node_sum = 0.0, bw_sum = 0.0;
  for (std::size_t v = 0; v < nv; ++v) {
    demand[v] = demand_vector(in.pn, vn, NodeId(v));
    node_sum += vn.total_node_demand(NodeId(v));
  }
  for (double b : vn.link_demand) bw_sum += b;
  const double revenue = node_sum + bw_sum;

  std::optional<Solution> best;
  double best_r2c = 0.0;
  FailureReason reason = FailureReason::node_resource;
  int deepest = -1;
  auto note_failure = [&](std::size_t depth, FailureReason r) {
    if (int(depth) > deepest) {
      deepest = int(depth);
      reason = r;
    }
  };

  Solution current = Solution::empty_for(vn);
  std::vector<char> used(np, 0);

  std::function<void(std::size_t, const PhysicalNetwork&, double, double)> dfs =
      [&](std::size_t t, const PhysicalNetwork& pn, double routed_cost, double unrouted_bw) {
        if (t == nv) {
          Solution s = current;
          s.feasible = true;
          finalize(vn, s);
          if (!best || s.r2c > best_r2c) {
            best_r2c = s.r2c;
            best = std::move(s);
          }
          return;
        }
        const NodeId v = order.nodes[t];
        bool placed_any = false;
        for (std::size_t p = 0; p < np; ++p) {
          if (used[p] || !fits_node(pn, demand[v], NodeId(p))) continue;
          placed_any = true;
          PhysicalNetwork next = pn;
          next.reserve_node(NodeId(p), demand[v]);
          current.node_mapping[v] = NodeId(p);
          double cost = routed_cost, rest = unrouted_bw;
          bool ok = true;
          for (int l : order.links_at[t]) {
            const auto& link = vn.links[l];
            std::optional<double> limit;
            if (vn.has_latency_limits()) limit = vn.latency_limit[l];
            auto r = route_virtual_link_detailed(next, vn.link_demand[l], limit,
                                                 current.node_mapping[link.u],
                                                 current.node_mapping[link.v], in.k_paths);
            if (!r.path) {
              note_failure(t + 1, r.reason);
              ok = false;
              break;
            }
            reserve_path(next, *r.path, vn.link_demand[l]);
            current.link_mapping[l] = r.path->nodes;
            cost += double(r.path->hops()) * vn.link_demand[l];
            rest -= vn.link_demand[l];
          }
          const double denominator = node_sum + cost + std::max(0.0, rest);
          const double bound = denominator > 0.0 ? revenue / denominator : 1.0;
          // Ties within rounding noise are still explored so the optimum is
          // the exact maximum of the evaluated R2C values.
          if (ok && (!best || bound > best_r2c - 1e-12)) {
            used[p] = 1;
            dfs(t + 1, next, cost, rest);
            used[p] = 0;
          }
          for (int l : order.links_at[t]) current.link_mapping[l].clear();
          current.node_mapping[v] = kUnmapped;
        }
        if (!placed_any) note_failure(t, FailureReason::node_resource);
      };
  dfs(0, in.pn, 0.0, bw_sum);
  if (best) return *best;
  return infeasible(vn, reason);
}

class ExactSolver : public Solver {
 public:
  explicit ExactSolver(ExactLimits limits = {}) : limits_(limits) {}
  std::string name() const override { return "exact"; }
  Solution solve(const Instance& in) const override { return solve_exact(in, limits_); }
  const ExactLimits& limits() const { return limits_; }

 private:
  ExactLimits limits_;
};

}  // namespace nfvra
