#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "nfvra/errors.hpp"
#include "nfvra/network.hpp"

namespace nfvra {

inline constexpr std::size_t kDefaultPathCount = 10;

enum class FailureReason {
  node_resource,
  link_resource,
  latency,
  connectivity,
  one_to_one,
  unplaced,
  solver_error,
};

inline std::string_view to_string(FailureReason r) {
  switch (r) {
    case FailureReason::node_resource: return "node_resource";
    case FailureReason::link_resource: return "link_resource";
    case FailureReason::latency: return "latency";
    case FailureReason::connectivity: return "connectivity";
    case FailureReason::one_to_one: return "one_to_one";
    case FailureReason::unplaced: return "unplaced";
    case FailureReason::solver_error: return "solver_error";
  }
  return "unknown";
}

inline std::optional<FailureReason> parse_failure_reason(std::string_view s) {
  for (auto r : {FailureReason::node_resource, FailureReason::link_resource,
                 FailureReason::latency, FailureReason::connectivity, FailureReason::one_to_one,
                 FailureReason::unplaced, FailureReason::solver_error})
    if (to_string(r) == s) return r;
  return std::nullopt;
}

inline constexpr NodeId kUnmapped = -1;

// Node mapping (virtual -> physical, kUnmapped for holes) and one physical
// node sequence per virtual link (empty when unrouted).
struct Solution {
  int request_id = 0;
  std::vector<NodeId> node_mapping;
  std::vector<std::vector<NodeId>> link_mapping;
  bool feasible = false;
  double revenue = 0.0;
  double cost = 0.0;
  double r2c = 0.0;
  std::optional<FailureReason> failure_reason;

  static Solution empty_for(const VirtualNetworkRequest& vn) {
    Solution s;
    s.request_id = vn.id;
    s.node_mapping.assign(vn.node_count, kUnmapped);
    s.link_mapping.assign(vn.links.size(), {});
    return s;
  }

  void fail(FailureReason reason) {
    feasible = false;
    failure_reason = reason;
    r2c = 0.0;
  }
};

struct Evaluation {
  double revenue = 0.0;
  double cost = 0.0;
  double r2c = 0.0;
};

inline double total_revenue(const VirtualNetworkRequest& vn) {
  double rev = 0.0;
  for (std::size_t v = 0; v < vn.node_count; ++v) rev += vn.total_node_demand(NodeId(v));
  for (double b : vn.link_demand) rev += b;
  return rev;
}

// REV = node demand (all kinds) + link bandwidth; COST charges each link's
// bandwidth once per hop of its path. Unrouted links count as one hop.
// R2C = REV / COST for feasible solutions, 0 otherwise.
inline Evaluation evaluate_solution(const VirtualNetworkRequest& vn, const Solution& s) {
  Evaluation e;
  double node_sum = 0.0;
  for (std::size_t v = 0; v < vn.node_count; ++v) node_sum += vn.total_node_demand(NodeId(v));
  e.revenue = node_sum;
  e.cost = node_sum;
  for (std::size_t l = 0; l < vn.links.size(); ++l) {
    const double b = vn.link_demand[l];
    e.revenue += b;
    const auto& path = l < s.link_mapping.size() ? s.link_mapping[l] : std::vector<NodeId>{};
    const std::size_t hops = path.size() >= 2 ? path.size() - 1 : 1;
    e.cost += double(hops) * b;
  }
  if (s.feasible) {
    if (s.node_mapping.size() != vn.node_count ||
        std::any_of(s.node_mapping.begin(), s.node_mapping.end(),
                    [](NodeId p) { return p == kUnmapped; }))
      throw InternalError("solution marked feasible with an incomplete node mapping");
    if (s.link_mapping.size() != vn.links.size() ||
        std::any_of(s.link_mapping.begin(), s.link_mapping.end(),
                    [](const auto& p) { return p.size() < 2; }))
      throw InternalError("solution marked feasible with an unrouted virtual link");
    e.r2c = e.cost > 0.0 ? e.revenue / e.cost : 1.0;
  }
  return e;
}

// Fills revenue/cost/r2c from the mappings.
inline void finalize(const VirtualNetworkRequest& vn, Solution& s) {
  const Evaluation e = evaluate_solution(vn, s);
  s.revenue = e.revenue;
  s.cost = e.cost;
  s.r2c = e.r2c;
  if (s.feasible) s.failure_reason.reset();
}

inline bool fits_node(const PhysicalNetwork& pn, std::span<const double> demand, NodeId p) {
  for (std::size_t k = 0; k < demand.size(); ++k)
    if (demand[k] > pn.node_available(k, p) + kResourceEpsilon) return false;
  return true;
}

// Per-VN exclusivity plus availability of every resource kind.
inline bool check_node_placement(const PhysicalNetwork& pn, const VirtualNetworkRequest& vn,
                                 NodeId vnode, NodeId pnode,
                                 std::span<const NodeId> partial_mapping) {
  for (std::size_t v = 0; v < partial_mapping.size(); ++v)
    if (NodeId(v) != vnode && partial_mapping[v] == pnode) return false;
  const auto demand = demand_vector(pn, vn, vnode);
  return fits_node(pn, demand, pnode);
}

struct RouteResult {
  std::optional<Path> path;
  FailureReason reason = FailureReason::link_resource;  // meaningful when !path
};

// First of the k hop-shortest candidates whose every link has enough
// available bandwidth and whose summed latency respects the link's limit.
inline RouteResult route_virtual_link_detailed(const PhysicalNetwork& pn, double demand,
                                               std::optional<double> latency_limit, NodeId src,
                                               NodeId dst, std::size_t k) {
  RouteResult out;
  const auto candidates = pn.topology().candidate_paths(src, dst, k);
  const std::size_t usable = std::min(k, candidates->size());
  if (usable == 0) {
    out.reason = FailureReason::connectivity;
    return out;
  }
  const bool check_latency = latency_limit.has_value() && pn.has_latency();
  bool bandwidth_ok_somewhere = false;
  for (std::size_t i = 0; i < usable; ++i) {
    const Path& path = (*candidates)[i];
    bool ok = true;
    for (LinkId l : path.links)
      if (demand > pn.link_available(l) + kResourceEpsilon) {
        ok = false;
        break;
      }
    if (!ok) continue;
    bandwidth_ok_somewhere = true;
    if (check_latency) {
      double total = 0.0;
      for (LinkId l : path.links) total += pn.link_latency(l);
      if (total > *latency_limit + kResourceEpsilon) continue;
    }
    out.path = path;
    return out;
  }
  out.reason = bandwidth_ok_somewhere ? FailureReason::latency : FailureReason::link_resource;
  return out;
}

inline std::optional<Path> route_virtual_link(const PhysicalNetwork& pn,
                                              const VirtualNetworkRequest& vn, int vlink,
                                              NodeId src, NodeId dst,
                                              std::size_t k = kDefaultPathCount) {
  std::optional<double> limit;
  if (vn.has_latency_limits()) limit = vn.latency_limit[vlink];
  return route_virtual_link_detailed(pn, vn.link_demand[vlink], limit, src, dst, k).path;
}

// Canonical decision order shared by the environment and every solver:
// virtual nodes by decreasing total demand (ties by id); at step t the links
// joining nodes[t] to already-placed nodes are routed by decreasing
// bandwidth (ties by link id). Routing a complete node mapping in this order
// gives the same paths as the step-by-step episode.
struct EmbeddingOrder {
  std::vector<NodeId> nodes;
  std::vector<int> position;               // position[v] = step at which v is placed
  std::vector<std::vector<int>> links_at;  // links routed right after step t
};

inline EmbeddingOrder embedding_order(const VirtualNetworkRequest& vn) {
  EmbeddingOrder order;
  order.nodes.resize(vn.node_count);
  for (std::size_t v = 0; v < vn.node_count; ++v) order.nodes[v] = NodeId(v);
  std::vector<double> total(vn.node_count);
  for (std::size_t v = 0; v < vn.node_count; ++v) total[v] = vn.total_node_demand(NodeId(v));
  std::stable_sort(order.nodes.begin(), order.nodes.end(),
                   [&](NodeId a, NodeId b) { return total[a] > total[b]; });
  order.position.assign(vn.node_count, 0);
  for (std::size_t t = 0; t < order.nodes.size(); ++t) order.position[order.nodes[t]] = int(t);
  order.links_at.assign(vn.node_count, {});
  for (std::size_t l = 0; l < vn.links.size(); ++l) {
    const auto& link = vn.links[l];
    const int step = std::max(order.position[link.u], order.position[link.v]);
    order.links_at[step].push_back(int(l));
  }
  for (auto& group : order.links_at)
    std::stable_sort(group.begin(), group.end(),
                     [&](int a, int b) { return vn.link_demand[a] > vn.link_demand[b]; });
  return order;
}

inline void reserve_path(PhysicalNetwork& pn, const Path& path, double bandwidth) {
  for (LinkId l : path.links) pn.reserve_link(l, bandwidth);
}

namespace detail {

inline std::optional<double> latency_limit_of(const VirtualNetworkRequest& vn, int l) {
  if (!vn.has_latency_limits()) return std::nullopt;
  return vn.latency_limit[l];
}

}  // namespace detail

// Completes a node mapping: checks it (totality, per-VN exclusivity, node
// resources), reserves node demands on `scratch`, then routes every virtual
// link in canonical order against the progressively reserved scratch
// network. The result is finalized; `scratch` holds the reservations of the
// successful prefix.
inline Solution embed_mapping(PhysicalNetwork& scratch, const VirtualNetworkRequest& vn,
                              std::span<const NodeId> mapping, const EmbeddingOrder& order,
                              std::size_t k = kDefaultPathCount) {
  Solution s = Solution::empty_for(vn);
  const auto kinds = map_kinds(scratch, vn);
  std::vector<char> used(scratch.node_count(), 0);
  std::vector<double> demand(scratch.node_kinds().size());
  for (NodeId v : order.nodes) {
    const NodeId p = v < NodeId(mapping.size()) ? mapping[v] : kUnmapped;
    if (p == kUnmapped || p < 0 || std::size_t(p) >= scratch.node_count()) {
      s.fail(FailureReason::unplaced);
      finalize(vn, s);
      return s;
    }
    if (used[p]) {
      s.fail(FailureReason::one_to_one);
      finalize(vn, s);
      return s;
    }
    std::fill(demand.begin(), demand.end(), 0.0);
    for (std::size_t kk = 0; kk < kinds.size(); ++kk) demand[kinds[kk]] += vn.node_demand[kk][v];
    if (!fits_node(scratch, demand, p)) {
      s.fail(FailureReason::node_resource);
      finalize(vn, s);
      return s;
    }
    scratch.reserve_node(p, demand);
    used[p] = 1;
    s.node_mapping[v] = p;
  }
  for (const auto& group : order.links_at) {
    for (int l : group) {
      const auto& link = vn.links[l];
      auto routed = route_virtual_link_detailed(scratch, vn.link_demand[l],
                                                detail::latency_limit_of(vn, l),
                                                s.node_mapping[link.u], s.node_mapping[link.v], k);
      if (!routed.path) {
        s.fail(routed.reason);
        finalize(vn, s);
        return s;
      }
      reserve_path(scratch, *routed.path, vn.link_demand[l]);
      s.link_mapping[l] = routed.path->nodes;
    }
  }
  s.feasible = true;
  finalize(vn, s);
  return s;
}

// ---------------------------------------------------------------------------
// Independent verification

struct FeasibilityReport {
  struct Check {
    std::string id;
    bool pass = true;
    std::string detail;
  };
  std::vector<Check> checks;

  bool all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }
  const Check* first_violation() const {
    for (const auto& c : checks)
      if (!c.pass) return &c;
    return nullptr;
  }
  std::optional<FailureReason> reason() const {
    const Check* c = first_violation();
    if (!c) return std::nullopt;
    if (c->id == "node_totality") return FailureReason::unplaced;
    if (c->id == "one_to_one") return FailureReason::one_to_one;
    if (c->id == "node_capacity") return FailureReason::node_resource;
    if (c->id == "link_capacity") return FailureReason::link_resource;
    if (c->id == "latency") return FailureReason::latency;
    return FailureReason::connectivity;
  }
  std::string summary() const {
    std::string out;
    for (const auto& c : checks) {
      out += c.id + (c.pass ? "=pass" : "=FAIL");
      if (!c.pass && !c.detail.empty()) out += " (" + c.detail + ")";
      out += "; ";
    }
    return out;
  }
};

// Re-checks a solution from its mappings alone against the network's
// current availability: totality and per-VN exclusivity of the node mapping,
// node capacity for every kind, path endpoints and adjacency, loop-freedom,
// aggregate bandwidth per physical link over all virtual links sharing it,
// and latency limits. Does not use the routing code.
inline FeasibilityReport verify_solution(const PhysicalNetwork& pn,
                                         const VirtualNetworkRequest& vn, const Solution& s) {
  FeasibilityReport report;
  auto add = [&](const char* id, bool pass, std::string detail = {}) {
    report.checks.push_back({id, pass, pass ? std::string() : std::move(detail)});
  };
  const std::size_t np = pn.node_count();

  bool total = s.node_mapping.size() == vn.node_count;
  std::string total_detail = total ? "" : "mapping size mismatch";
  for (std::size_t v = 0; total && v < vn.node_count; ++v) {
    const NodeId p = s.node_mapping[v];
    if (p < 0 || std::size_t(p) >= np) {
      total = false;
      total_detail = "virtual node " + std::to_string(v) + " unmapped";
    }
  }
  add("node_totality", total, total_detail);

  bool unique = true;
  std::string unique_detail;
  std::map<NodeId, std::size_t> host;
  for (std::size_t v = 0; v < s.node_mapping.size(); ++v) {
    const NodeId p = s.node_mapping[v];
    if (p < 0) continue;
    auto [it, fresh] = host.emplace(p, v);
    if (!fresh) {
      unique = false;
      unique_detail = "physical node " + std::to_string(p) + " hosts virtual nodes " +
                      std::to_string(it->second) + " and " + std::to_string(v);
    }
  }
  add("one_to_one", unique, unique_detail);

  bool capacity = true;
  std::string capacity_detail;
  if (total) {
    std::vector<std::vector<double>> load(pn.node_kinds().size(), std::vector<double>(np, 0.0));
    for (std::size_t kk = 0; kk < vn.node_kinds.size(); ++kk) {
      auto idx = pn.kind_index(vn.node_kinds[kk]);
      if (!idx) {
        capacity = false;
        capacity_detail = "unknown resource kind " + vn.node_kinds[kk];
        continue;
      }
      for (std::size_t v = 0; v < vn.node_count; ++v)
        load[*idx][s.node_mapping[v]] += vn.node_demand[kk][v];
    }
    for (std::size_t k = 0; k < load.size(); ++k)
      for (std::size_t p = 0; p < np; ++p)
        if (load[k][p] > pn.node_available(k, NodeId(p)) + kResourceEpsilon) {
          capacity = false;
          capacity_detail = pn.node_kinds()[k] + " on node " + std::to_string(p);
        }
  } else {
    capacity = false;
    capacity_detail = "node mapping incomplete";
  }
  add("node_capacity", capacity, capacity_detail);

  bool endpoints = s.link_mapping.size() == vn.links.size();
  std::string endpoint_detail = endpoints ? "" : "link mapping size mismatch";
  bool loop_free = true;
  std::string loop_detail;
  bool latency_ok = true;
  std::string latency_detail;
  std::vector<double> link_load(pn.link_count(), 0.0);
  for (std::size_t l = 0; endpoints && l < vn.links.size(); ++l) {
    const auto& path = s.link_mapping[l];
    const auto& vl = vn.links[l];
    if (path.size() < 2 || !total || path.front() != s.node_mapping[vl.u] ||
        path.back() != s.node_mapping[vl.v]) {
      endpoints = false;
      endpoint_detail = "virtual link " + std::to_string(l) + " path does not join its hosts";
      break;
    }
    std::vector<NodeId> sorted = path;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      loop_free = false;
      loop_detail = "virtual link " + std::to_string(l) + " revisits a node";
    }
    double delay = 0.0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      const NodeId a = path[i], b = path[i + 1];
      std::optional<LinkId> pl;
      if (a >= 0 && b >= 0 && std::size_t(a) < np && std::size_t(b) < np)
        pl = pn.topology().link_between(a, b);
      if (!pl) {
        endpoints = false;
        endpoint_detail = "virtual link " + std::to_string(l) + " uses a non-existent hop";
        break;
      }
      link_load[*pl] += vn.link_demand[l];
      delay += pn.link_latency(*pl);
    }
    if (vn.has_latency_limits() && pn.has_latency() &&
        delay > vn.latency_limit[l] + kResourceEpsilon) {
      latency_ok = false;
      latency_detail = "virtual link " + std::to_string(l) + " delay " + std::to_string(delay);
    }
  }
  add("path_connectivity", endpoints, endpoint_detail);
  add("loop_free", loop_free, loop_detail);

  bool bandwidth = endpoints;
  std::string bandwidth_detail = endpoints ? "" : "paths invalid";
  if (endpoints)
    for (std::size_t pl = 0; pl < link_load.size(); ++pl)
      if (link_load[pl] > pn.link_available(LinkId(pl)) + kResourceEpsilon) {
        bandwidth = false;
        bandwidth_detail = "physical link " + std::to_string(pl) + " needs " +
                           std::to_string(link_load[pl]) + " of " +
                           std::to_string(pn.link_available(LinkId(pl)));
      }
  add("link_capacity", bandwidth, bandwidth_detail);
  add("latency", latency_ok, latency_detail);
  return report;
}

// ---------------------------------------------------------------------------
// Allocation

class AllocationError : public StateError {
 public:
  AllocationError(const std::string& what, FeasibilityReport report)
      : StateError(what), report_(std::move(report)) {}
  const FeasibilityReport& report() const { return report_; }

 private:
  FeasibilityReport report_;
};

inline void allocate(PhysicalNetwork& pn, const VirtualNetworkRequest& vn, const Solution& s) {
  auto report = verify_solution(pn, vn, s);
  if (!report.all_pass())
    throw AllocationError("allocation of request " + std::to_string(vn.id) +
                              " rejected: " + report.summary(),
                          std::move(report));
  pn.mark_active(vn.id);
  for (std::size_t v = 0; v < vn.node_count; ++v)
    pn.reserve_node(s.node_mapping[v], demand_vector(pn, vn, NodeId(v)));
  for (std::size_t l = 0; l < vn.links.size(); ++l) {
    const auto& path = s.link_mapping[l];
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
      pn.reserve_link(*pn.topology().link_between(path[i], path[i + 1]), vn.link_demand[l]);
  }
}

inline void release(PhysicalNetwork& pn, const VirtualNetworkRequest& vn, const Solution& s) {
  pn.mark_inactive(vn.id);
  for (std::size_t v = 0; v < vn.node_count; ++v)
    pn.free_node(s.node_mapping[v], demand_vector(pn, vn, NodeId(v)));
  for (std::size_t l = 0; l < vn.links.size(); ++l) {
    const auto& path = s.link_mapping[l];
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
      pn.free_link(*pn.topology().link_between(path[i], path[i + 1]), vn.link_demand[l]);
  }
}

// ---------------------------------------------------------------------------
// Audit record: one line per solution,
//   id=<n> feasible=<0|1> rev=<x> cost=<x> r2c=<x> reason=<name|-> nodes=<v:p,...>
//   links=<l:p>p>p;...
// Reals are written with 17 significant digits so records round-trip.

inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string to_record(const Solution& s) {
  std::ostringstream os;
  os << "id=" << s.request_id << " feasible=" << (s.feasible ? 1 : 0)
     << " rev=" << format_real(s.revenue) << " cost=" << format_real(s.cost)
     << " r2c=" << format_real(s.r2c) << " reason="
     << (s.failure_reason ? std::string(to_string(*s.failure_reason)) : "-") << " nodes=";
  for (std::size_t v = 0; v < s.node_mapping.size(); ++v)
    os << (v ? "," : "") << v << ":" << s.node_mapping[v];
  os << " links=";
  for (std::size_t l = 0; l < s.link_mapping.size(); ++l) {
    os << (l ? ";" : "") << l << ":";
    for (std::size_t i = 0; i < s.link_mapping[l].size(); ++i)
      os << (i ? ">" : "") << s.link_mapping[l][i];
  }
  return os.str();
}

inline Solution parse_record(const std::string& line) {
  Solution s;
  std::istringstream in(line);
  std::string token;
  auto bad = [&](const std::string& why) { return FormatError("solution record: " + why); };
  auto split = [](const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream is(text);
    while (std::getline(is, cur, sep)) parts.push_back(cur);
    return parts;
  };
  bool has_id = false, has_feasible = false;
  try {
    while (in >> token) {
      const auto eq = token.find('=');
      if (eq == std::string::npos) throw bad("token without '=': " + token);
      const std::string key = token.substr(0, eq), value = token.substr(eq + 1);
      if (key == "id") {
        s.request_id = std::stoi(value);
        has_id = true;
      } else if (key == "feasible") {
        if (value != "0" && value != "1") throw bad("feasible must be 0 or 1");
        s.feasible = value == "1";
        has_feasible = true;
      } else if (key == "rev") {
        s.revenue = std::stod(value);
      } else if (key == "cost") {
        s.cost = std::stod(value);
      } else if (key == "r2c") {
        s.r2c = std::stod(value);
      } else if (key == "reason") {
        if (value != "-") {
          s.failure_reason = parse_failure_reason(value);
          if (!s.failure_reason) throw bad("unknown reason " + value);
        }
      } else if (key == "nodes") {
        for (const auto& pair : split(value, ',')) {
          const auto colon = pair.find(':');
          if (colon == std::string::npos) throw bad("node pair " + pair);
          const auto v = std::size_t(std::stoul(pair.substr(0, colon)));
          if (s.node_mapping.size() <= v) s.node_mapping.resize(v + 1, kUnmapped);
          s.node_mapping[v] = std::stoi(pair.substr(colon + 1));
        }
      } else if (key == "links") {
        for (const auto& entry : split(value, ';')) {
          const auto colon = entry.find(':');
          if (colon == std::string::npos) throw bad("link entry " + entry);
          const auto l = std::size_t(std::stoul(entry.substr(0, colon)));
          if (s.link_mapping.size() <= l) s.link_mapping.resize(l + 1);
          const std::string seq = entry.substr(colon + 1);
          if (!seq.empty())
            for (const auto& hop : split(seq, '>')) s.link_mapping[l].push_back(std::stoi(hop));
        }
      } else {
        throw bad("unknown key " + key);
      }
    }
  } catch (const std::invalid_argument&) {
    throw bad("malformed number in '" + line + "'");
  } catch (const std::out_of_range&) {
    throw bad("number out of range in '" + line + "'");
  }
  if (!has_id || !has_feasible) throw bad("missing id or feasible field");
  return s;
}

}  // namespace nfvra
