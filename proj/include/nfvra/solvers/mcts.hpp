#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "nfvra/environment.hpp"
#include "nfvra/random.hpp"
#include "nfvra/solvers/solver.hpp"

namespace nfvra {

struct MctsConfig {
  int simulations = 200;  // per decision
  double exploration = std::sqrt(2.0);

  void validate() const {
    if (simulations < 1) throw ConfigError("solvers.mcts.simulations", "must be >= 1");
    if (!(exploration > 0.0)) throw ConfigError("solvers.mcts.exploration", "must be > 0");
  }
};

namespace detail {

struct MctsNode {
  EnvState state;
  int parent = -1;
  NodeId action = kUnmapped;
  std::vector<int> children;
  std::vector<NodeId> untried;
  int visits = 0;
  double value = 0.0;
};

inline std::vector<NodeId> legal_actions(const EnvState& s) {
  std::vector<NodeId> out;
  if (s.done()) return out;
  const auto mask = action_mask(s);
  for (std::size_t p = 0; p < mask.size(); ++p)
    if (mask[p]) out.push_back(NodeId(p));
  return out;
}

// Uniform random placement among unmasked actions until the episode ends.
inline double rollout(EnvState s, Rng& rng) {
  while (!s.done()) {
    const auto actions = legal_actions(s);
    if (actions.empty()) return 0.0;
    apply_action(s, actions[uniform_index(rng, actions.size())]);
  }
  return s.outcome == Outcome::success ? s.partial.r2c : 0.0;
}

}  // namespace detail

inline Solution solve_mcts(const Instance& in, const MctsConfig& cfg = {}) {
  cfg.validate();
  using detail::MctsNode;
  Rng rng = make_stream(in.seed, "mcts");
  auto request = std::make_shared<const VirtualNetworkRequest>(in.vn);
  std::vector<MctsNode> tree;
  auto add_node = [&](EnvState state, int parent, NodeId action) {
    MctsNode node{std::move(state), parent, action, {}, {}, 0, 0.0};
    node.untried = detail::legal_actions(node.state);
    std::shuffle(node.untried.begin(), node.untried.end(), rng);
    tree.push_back(std::move(node));
    return int(tree.size()) - 1;
  };
  int root = add_node(EnvState(in.pn, request, in.k_paths), -1, kUnmapped);

  while (!tree[root].state.done()) {
    if (tree[root].untried.empty() && tree[root].children.empty())
      return infeasible(in.vn, FailureReason::node_resource);
    for (int sim = 0; sim < cfg.simulations; ++sim) {
      int node = root;
      while (tree[node].untried.empty() && !tree[node].children.empty() &&
             !tree[node].state.done()) {
        const double log_n = std::log(double(tree[node].visits));
        int best = -1;
        double best_score = -1.0;
        for (int c : tree[node].children) {
          const auto& ch = tree[c];
          const double score = ch.value / ch.visits + cfg.exploration * std::sqrt(log_n / ch.visits);
          if (score > best_score) {
            best_score = score;
            best = c;
          }
        }
        node = best;
      }
      double value;
      if (!tree[node].state.done() && !tree[node].untried.empty()) {
        const NodeId action = tree[node].untried.back();
        tree[node].untried.pop_back();
        EnvState next = tree[node].state;
        apply_action(next, action);
        const int child = add_node(std::move(next), node, action);
        tree[node].children.push_back(child);
        node = child;
        value = detail::rollout(tree[node].state, rng);
      } else {
        value = tree[node].state.outcome == Outcome::success ? tree[node].state.partial.r2c : 0.0;
      }
      for (int n = node; n != -1; n = tree[n].parent) {
        ++tree[n].visits;
        tree[n].value += value;
      }
    }
    int chosen = -1;
    for (int c : tree[root].children) {
      if (chosen == -1) {
        chosen = c;
        continue;
      }
      const auto& a = tree[c];
      const auto& b = tree[chosen];
      if (a.visits > b.visits ||
          (a.visits == b.visits && a.value / a.visits > b.value / b.visits) ||
          (a.visits == b.visits && a.value / a.visits == b.value / b.visits && a.action < b.action))
        chosen = c;
    }
    root = chosen;
  }
  Solution out = tree[root].state.partial;
  out.request_id = in.vn.id;
  return out;
}

class MctsSolver : public Solver {
 public:
  explicit MctsSolver(MctsConfig cfg = {}) : cfg_(cfg) { cfg_.validate(); }
  std::string name() const override { return "mcts"; }
  Solution solve(const Instance& in) const override { return solve_mcts(in, cfg_); }
  const MctsConfig& config() const { return cfg_; }

 private:
  MctsConfig cfg_;
};

}  // namespace nfvra
