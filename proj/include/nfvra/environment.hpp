#pragma once

// Episodic placement MDP: one step places the current virtual node (in
// canonical order) and routes its links to already-placed neighbours.

#include <algorithm>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nfvra/embedding.hpp"
#include "nfvra/graph_metrics.hpp"

namespace nfvra {

class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(std::string code, const std::string& detail)
      : std::runtime_error(detail), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

enum class RewardKind { noir, fir, air };

inline constexpr double kDefaultDiscount = 0.99;

struct RewardSpec {
  RewardKind kind = RewardKind::fir;
  double value = 0.1;                     // FIR step reward
  std::optional<double> failure_penalty;  // defaults per kind, see penalty()
  double discount = kDefaultDiscount;

  static RewardSpec noir() { return {RewardKind::noir, 0.0, std::nullopt}; }
  static RewardSpec fir(double v) { return {RewardKind::fir, v, std::nullopt}; }
  static RewardSpec air() { return {RewardKind::air, 0.0, std::nullopt}; }

  double step_reward(std::size_t vn_size) const {
    switch (kind) {
      case RewardKind::noir: return 0.0;
      case RewardKind::fir: return value;
      case RewardKind::air: return 1.0 / double(vn_size);
    }
    return 0.0;
  }
  double penalty(std::size_t vn_size) const {
    if (failure_penalty) return *failure_penalty;
    return -step_reward(vn_size);
  }
};

inline std::string_view to_string(RewardKind k) {
  switch (k) {
    case RewardKind::noir: return "noir";
    case RewardKind::fir: return "fir";
    case RewardKind::air: return "air";
  }
  return "?";
}

struct FeatureSpec {
  bool status = true;
  bool topological = true;
  bool resources = true;
};

enum class Outcome { in_progress, success, failure };

inline std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::in_progress: return "in_progress";
    case Outcome::success: return "success";
    case Outcome::failure: return "failure";
  }
  return "?";
}

// Cheap to copy: the request and order are shared, the scratch network
// shares its immutable parts.
struct EnvState {
  std::shared_ptr<const VirtualNetworkRequest> vn;
  std::shared_ptr<const EmbeddingOrder> order;
  PhysicalNetwork pn;
  std::size_t k_paths = kDefaultPathCount;
  std::vector<char> used;
  std::size_t t = 0;
  Solution partial;
  Outcome outcome = Outcome::in_progress;

  EnvState(const PhysicalNetwork& snapshot, std::shared_ptr<const VirtualNetworkRequest> request,
           std::size_t k = kDefaultPathCount)
      : vn(std::move(request)),
        order(std::make_shared<const EmbeddingOrder>(embedding_order(*vn))),
        pn(snapshot),
        k_paths(k),
        used(snapshot.node_count(), 0),
        partial(Solution::empty_for(*vn)) {}

  bool done() const { return outcome != Outcome::in_progress; }
  NodeId current_vnode() const { return t < order->nodes.size() ? order->nodes[t] : kUnmapped; }
};

inline std::vector<char> action_mask(const EnvState& s) {
  std::vector<char> mask(s.pn.node_count(), 0);
  if (s.done()) return mask;
  const auto demand = demand_vector(s.pn, *s.vn, s.current_vnode());
  for (std::size_t p = 0; p < mask.size(); ++p)
    mask[p] = !s.used[p] && fits_node(s.pn, demand, NodeId(p));
  return mask;
}

// Applies one placement; returns false when the episode failed on it.
inline bool apply_action(EnvState& s, NodeId action) {
  if (s.done()) throw ProtocolError("episode_done", "step on a finished episode");
  if (action < 0 || std::size_t(action) >= s.pn.node_count())
    throw ProtocolError("bad_action", "action " + std::to_string(action) + " out of range [0, " +
                                          std::to_string(s.pn.node_count()) + ")");
  const auto& vn = *s.vn;
  const NodeId v = s.current_vnode();
  auto fail = [&](FailureReason r) {
    s.outcome = Outcome::failure;
    s.partial.fail(r);
    finalize(vn, s.partial);
    return false;
  };
  if (s.used[action]) return fail(FailureReason::one_to_one);
  const auto demand = demand_vector(s.pn, vn, v);
  if (!fits_node(s.pn, demand, action)) return fail(FailureReason::node_resource);
  s.pn.reserve_node(action, demand);
  s.used[action] = 1;
  s.partial.node_mapping[v] = action;
  for (int l : s.order->links_at[s.t]) {
    const auto& link = vn.links[l];
    std::optional<double> limit;
    if (vn.has_latency_limits()) limit = vn.latency_limit[l];
    auto routed = route_virtual_link_detailed(s.pn, vn.link_demand[l], limit,
                                              s.partial.node_mapping[link.u],
                                              s.partial.node_mapping[link.v], s.k_paths);
    if (!routed.path) return fail(routed.reason);
    reserve_path(s.pn, *routed.path, vn.link_demand[l]);
    s.partial.link_mapping[l] = routed.path->nodes;
  }
  ++s.t;
  if (s.t == vn.node_count) {
    s.outcome = Outcome::success;
    s.partial.feasible = true;
    finalize(vn, s.partial);
  }
  return true;
}

// ---------------------------------------------------------------------------
// Features

struct FeatureManifest {
  std::vector<std::string> pn_columns;
  std::vector<std::string> vn_columns;
};

struct Observation {
  std::vector<std::vector<double>> pn_features;  // [physical node][column]
  std::vector<std::vector<double>> vn_features;  // [virtual node][column]
  NodeId current_vnode = kUnmapped;
  std::vector<char> mask;
};

// Column semantics. Resource columns are divided by the substrate-wide max
// capacity of their kind (link columns by the max link capacity) and clamped
// to [0,1]; centralities are divided by their per-graph max.
inline FeatureManifest feature_manifest(const PhysicalNetwork& pn, const FeatureSpec& spec) {
  FeatureManifest m;
  if (spec.resources) {
    for (const auto& k : pn.node_kinds()) m.pn_columns.push_back("avail_" + k);
    m.pn_columns.push_back("avail_bandwidth_mean");
    for (const auto& k : pn.node_kinds()) m.pn_columns.push_back("current_demand_" + k);
    for (const auto& k : pn.node_kinds()) m.vn_columns.push_back("demand_" + k);
    m.vn_columns.push_back("demand_bandwidth_mean");
  }
  if (spec.status) {
    m.pn_columns.push_back("hosted");
    m.vn_columns.push_back("placed");
    m.vn_columns.push_back("current");
  }
  if (spec.topological) {
    for (const char* c : {"degree", "closeness", "betweenness", "eigenvector"}) {
      m.pn_columns.push_back(c);
      m.vn_columns.push_back(c);
    }
  }
  return m;
}

namespace detail {

inline double ratio(double x, double scale) {
  if (!(scale > 0.0)) return 0.0;
  return std::clamp(x / scale, 0.0, 1.0);
}

inline void push_centralities(std::vector<std::vector<double>>& rows, const StaticCentralities& c) {
  const auto d = normalize_by_max(c.degree), cl = normalize_by_max(c.closeness),
             b = normalize_by_max(c.betweenness), e = normalize_by_max(c.eigenvector);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].push_back(d[i]);
    rows[i].push_back(cl[i]);
    rows[i].push_back(b[i]);
    rows[i].push_back(e[i]);
  }
}

}  // namespace detail

inline StaticCentralities compute_centralities(const Adjacency& adj) {
  return {degree_centrality(adj), closeness_centrality(adj), betweenness_centrality(adj),
          eigenvector_centrality(adj)};
}

inline Observation extract_features(const EnvState& s, const FeatureSpec& spec,
                                    const StaticCentralities* vn_centralities = nullptr) {
  const auto& pn = s.pn;
  const auto& vn = *s.vn;
  const std::size_t kinds = pn.node_kinds().size();
  const double max_bw = pn.max_link_capacity();
  std::vector<double> max_cap(kinds);
  for (std::size_t k = 0; k < kinds; ++k) max_cap[k] = pn.max_node_capacity(k);

  Observation obs;
  obs.current_vnode = s.done() ? kUnmapped : s.current_vnode();
  obs.mask = action_mask(s);
  obs.pn_features.assign(pn.node_count(), {});
  obs.vn_features.assign(vn.node_count, {});

  if (spec.resources) {
    std::vector<double> current(kinds, 0.0);
    if (obs.current_vnode != kUnmapped) current = demand_vector(pn, vn, obs.current_vnode);
    for (std::size_t p = 0; p < pn.node_count(); ++p) {
      auto& row = obs.pn_features[p];
      for (std::size_t k = 0; k < kinds; ++k)
        row.push_back(detail::ratio(pn.node_available(k, NodeId(p)), max_cap[k]));
      double bw = 0.0;
      const auto nbrs = pn.topology().neighbors(NodeId(p));
      for (const auto& nb : nbrs) bw += pn.link_available(nb.link);
      row.push_back(nbrs.empty() ? 0.0 : detail::ratio(bw / double(nbrs.size()), max_bw));
      for (std::size_t k = 0; k < kinds; ++k) row.push_back(detail::ratio(current[k], max_cap[k]));
    }
    std::vector<double> bw_sum(vn.node_count, 0.0);
    std::vector<int> deg(vn.node_count, 0);
    for (std::size_t l = 0; l < vn.links.size(); ++l) {
      bw_sum[vn.links[l].u] += vn.link_demand[l];
      bw_sum[vn.links[l].v] += vn.link_demand[l];
      ++deg[vn.links[l].u];
      ++deg[vn.links[l].v];
    }
    for (std::size_t v = 0; v < vn.node_count; ++v) {
      auto& row = obs.vn_features[v];
      const auto d = demand_vector(pn, vn, NodeId(v));
      for (std::size_t k = 0; k < kinds; ++k) row.push_back(detail::ratio(d[k], max_cap[k]));
      row.push_back(deg[v] ? detail::ratio(bw_sum[v] / deg[v], max_bw) : 0.0);
    }
  }
  if (spec.status) {
    for (std::size_t p = 0; p < pn.node_count(); ++p) obs.pn_features[p].push_back(s.used[p] ? 1.0 : 0.0);
    for (std::size_t v = 0; v < vn.node_count; ++v) {
      obs.vn_features[v].push_back(s.partial.node_mapping[v] != kUnmapped ? 1.0 : 0.0);
      obs.vn_features[v].push_back(NodeId(v) == obs.current_vnode ? 1.0 : 0.0);
    }
  }
  if (spec.topological) {
    detail::push_centralities(obs.pn_features, pn.topology().centralities());
    if (vn_centralities) {
      detail::push_centralities(obs.vn_features, *vn_centralities);
    } else {
      detail::push_centralities(obs.vn_features, compute_centralities(vn.adjacency()));
    }
  }
  return obs;
}

struct Transition {
  Observation obs;
  double reward = 0.0;
  bool done = false;
  Outcome outcome = Outcome::in_progress;
  double r2c = 0.0;
  std::optional<FailureReason> reason;
};

// Reward-bearing wrapper around EnvState.
class Environment {
 public:
  explicit Environment(RewardSpec reward = {}, FeatureSpec features = {})
      : reward_(reward), features_(features) {}

  Observation reset(const PhysicalNetwork& pn, VirtualNetworkRequest vn,
                    std::size_t k_paths = kDefaultPathCount) {
    auto request = std::make_shared<const VirtualNetworkRequest>(std::move(vn));
    vn_centralities_ = compute_centralities(request->adjacency());
    state_.emplace(pn, std::move(request), k_paths);
    episode_return_ = 0.0;
    return observe();
  }

  Transition step(NodeId action) {
    if (!state_) throw ProtocolError("no_episode", "step before reset");
    auto& s = *state_;
    const bool ok = apply_action(s, action);
    Transition tr;
    const std::size_t n = s.vn->node_count;
    if (!ok) {
      tr.reward = reward_.penalty(n);
    } else {
      tr.reward = reward_.step_reward(n);
      if (s.outcome == Outcome::success) tr.reward += s.partial.r2c;
    }
    episode_return_ += tr.reward;
    tr.done = s.done();
    tr.outcome = s.outcome;
    tr.r2c = s.partial.r2c;
    tr.reason = s.partial.failure_reason;
    tr.obs = observe();
    return tr;
  }

  Observation observe() const {
    if (!state_) throw ProtocolError("no_episode", "observe before reset");
    return extract_features(*state_, features_, &vn_centralities_);
  }

  const EnvState& state() const {
    if (!state_) throw ProtocolError("no_episode", "no episode in progress");
    return *state_;
  }
  double episode_return() const { return episode_return_; }
  const RewardSpec& reward_spec() const { return reward_; }
  const FeatureSpec& feature_spec() const { return features_; }

 private:
  RewardSpec reward_;
  FeatureSpec features_;
  std::optional<EnvState> state_;
  StaticCentralities vn_centralities_;
  double episode_return_ = 0.0;
};

}  // namespace nfvra
