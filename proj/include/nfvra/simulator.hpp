#pragma once

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include "nfvra/config.hpp"
#include "nfvra/generators.hpp"
#include "nfvra/metrics.hpp"
#include "nfvra/solvers/solver.hpp"

namespace nfvra {

struct Event {
  enum class Kind { departure = 0, arrival = 1 };
  double time = 0.0;
  Kind kind = Kind::arrival;
  int request = 0;
};

// Nondecreasing time; departures before arrivals at equal times; then id.
struct EventLater {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    if (a.kind != b.kind) return a.kind > b.kind;
    return a.request > b.request;
  }
};

using EventQueue = std::priority_queue<Event, std::vector<Event>, EventLater>;

struct RunRecord {
  std::string solver;
  std::string topology;
  double arrival_rate = 0.0;
  std::uint64_t seed = 0;
  std::string fingerprint;
  std::vector<RequestRow> rows;
  MetricsSummary summary;
  std::optional<double> energy;   // integrated power over the horizon
  std::size_t debug_checks = 0;   // per-event accounting checks performed
  std::size_t verification_rejects = 0;  // feasible claims rejected by verify_solution
  bool restored = false;          // final usage back to zero everywhere
};

// Fails with InternalError when the substrate's usage differs from the sum
// of the active solutions' demands by more than kResourceEpsilon.
inline void check_conservation(const PhysicalNetwork& pn,
                               const std::map<int, std::pair<const VirtualNetworkRequest*, Solution>>& active) {
  const std::size_t kinds = pn.node_kinds().size();
  std::vector<std::vector<double>> node(kinds, std::vector<double>(pn.node_count(), 0.0));
  std::vector<double> link(pn.link_count(), 0.0);
  for (const auto& [id, entry] : active) {
    const auto& [vn, sol] = entry;
    for (std::size_t v = 0; v < vn->node_count; ++v) {
      const auto d = demand_vector(pn, *vn, NodeId(v));
      for (std::size_t k = 0; k < kinds; ++k) node[k][sol.node_mapping[v]] += d[k];
    }
    for (std::size_t l = 0; l < vn->links.size(); ++l) {
      const auto& p = sol.link_mapping[l];
      for (std::size_t i = 0; i + 1 < p.size(); ++i)
        link[*pn.topology().link_between(p[i], p[i + 1])] += vn->link_demand[l];
    }
  }
  for (std::size_t k = 0; k < kinds; ++k)
    for (std::size_t n = 0; n < pn.node_count(); ++n)
      if (std::abs(pn.node_used(k, NodeId(n)) - node[k][n]) > kResourceEpsilon)
        throw InternalError("conservation violated on node " + std::to_string(n));
  for (std::size_t l = 0; l < pn.link_count(); ++l)
    if (std::abs(pn.link_used(LinkId(l)) - link[l]) > kResourceEpsilon)
      throw InternalError("conservation violated on link " + std::to_string(l));
  for (std::size_t k = 0; k < kinds; ++k)
    for (std::size_t n = 0; n < pn.node_count(); ++n)
      if (pn.node_available(k, NodeId(n)) < -kResourceEpsilon)
        throw InternalError("negative availability on node " + std::to_string(n));
  for (std::size_t l = 0; l < pn.link_count(); ++l)
    if (pn.link_available(LinkId(l)) < -kResourceEpsilon)
      throw InternalError("negative availability on link " + std::to_string(l));
}

// P_idle·[active] + (P_peak − P_idle)·utilization summed over nodes, where
// utilization is the mean used/capacity over node kinds.
inline double power_draw(const PhysicalNetwork& pn) {
  const auto& energy = pn.attributes().energy;
  if (!energy) return 0.0;
  double watts = 0.0;
  const std::size_t kinds = pn.node_kinds().size();
  for (std::size_t n = 0; n < pn.node_count(); ++n) {
    if (pn.node_load(NodeId(n)) == 0) continue;
    double util = 0.0;
    for (std::size_t k = 0; k < kinds; ++k) {
      const double cap = pn.node_capacity(k, NodeId(n));
      util += cap > 0.0 ? pn.node_used(k, NodeId(n)) / cap : 0.0;
    }
    util /= double(kinds);
    watts += energy->p_idle[n] + (energy->p_peak[n] - energy->p_idle[n]) * util;
  }
  return watts;
}

struct SimulationOptions {
  std::optional<double> time_limit;  // seconds per request
  bool debug_checks = false;
  std::size_t k_paths = kDefaultPathCount;
};

inline std::uint64_t instance_seed(std::uint64_t run_seed, int request_id) {
  return stream_seed(run_seed, "solver", std::uint64_t(request_id));
}

// Online run over a prepared substrate and request list. The substrate is
// consumed; each solver call sees a snapshot copy.
inline RunRecord simulate(PhysicalNetwork pn, const std::vector<VirtualNetworkRequest>& requests,
                          const Solver& solver, std::uint64_t seed,
                          const SimulationOptions& options = {}) {
  RunRecord rec;
  rec.solver = solver.name();
  rec.seed = seed;
  rec.rows.resize(requests.size());
  std::map<int, std::size_t> index;
  EventQueue queue;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    const auto& vn = requests[i];
    if (!index.emplace(vn.id, i).second)
      throw ValidationError("duplicate request id " + std::to_string(vn.id));
    queue.push({vn.arrival_time, Event::Kind::arrival, vn.id});
    auto& row = rec.rows[i];
    row.id = vn.id;
    row.arrival = vn.arrival_time;
    row.lifetime = vn.lifetime;
    row.size = vn.node_count;
    row.phase = vn.phase;
  }

  std::map<int, std::pair<const VirtualNetworkRequest*, Solution>> active;
  const bool track_energy = pn.attributes().energy.has_value();
  double energy = 0.0, clock = 0.0;

  while (!queue.empty()) {
    const Event ev = queue.top();
    queue.pop();
    if (track_energy) energy += power_draw(pn) * (ev.time - clock);
    clock = ev.time;
    const std::size_t i = index.at(ev.request);
    const auto& vn = requests[i];
    auto& row = rec.rows[i];

    if (ev.kind == Event::Kind::departure) {
      auto it = active.find(vn.id);
      if (it == active.end())
        throw InternalError("departure for request " + std::to_string(vn.id) + " that is not active");
      release(pn, vn, it->second.second);
      active.erase(it);
    } else {
      const PhysicalNetwork snapshot = pn;
      Instance instance{vn, snapshot, instance_seed(seed, vn.id), options.k_paths};
      Solution sol;
      const auto start = std::chrono::steady_clock::now();
      bool solver_failed = false;
      try {
        sol = solver.solve(instance);
      } catch (const std::exception&) {
        solver_failed = true;
      }
      row.solve_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (!solver_failed && options.time_limit && row.solve_seconds > *options.time_limit)
        solver_failed = true;

      if (solver_failed) {
        row.failure_reason = FailureReason::solver_error;
      } else if (!sol.feasible) {
        row.failure_reason = sol.failure_reason.value_or(FailureReason::unplaced);
      } else {
        const auto report = verify_solution(pn, vn, sol);
        if (!report.all_pass()) {
          ++rec.verification_rejects;
          row.failure_reason = report.reason();
        } else {
          const auto e = evaluate_solution(vn, sol);
          allocate(pn, vn, sol);
          row.accepted = true;
          row.revenue = e.revenue;
          row.cost = e.cost;
          row.r2c = e.r2c;
          active.emplace(vn.id, std::make_pair(&vn, std::move(sol)));
          queue.push({vn.arrival_time + vn.lifetime, Event::Kind::departure, vn.id});
        }
      }
    }
    if (options.debug_checks) {
      check_conservation(pn, active);
      ++rec.debug_checks;
    }
  }
  if (track_energy) rec.energy = energy;
  rec.restored = pn.pristine();
  rec.summary = compute_metrics(rec.rows);
  return rec;
}

inline RunRecord run_simulation(const SimulationConfig& raw, const Solver& solver,
                                std::uint64_t seed) {
  const SimulationConfig cfg = resolve_scenario(raw);
  validate(cfg);
  SimulationOptions options;
  options.time_limit = cfg.solver_time_limit;
  options.debug_checks = cfg.debug_checks;
  options.k_paths = std::size_t(cfg.k_paths);
  auto rec = simulate(build_physical_network(cfg, seed), generate_request_sequence(cfg, seed),
                      solver, seed, options);
  rec.topology = cfg.topology.label;
  rec.arrival_rate = cfg.arrival_rate;
  rec.fingerprint = fingerprint(cfg);
  return rec;
}

// ---------------------------------------------------------------------------
// Export

inline std::string format_rate(double eta) {
  std::ostringstream os;
  os << eta;
  return os.str();
}

inline std::string record_basename(const RunRecord& rec) {
  return rec.solver + "_" + (rec.topology.empty() ? "pn" : rec.topology) + "_eta" +
         format_rate(rec.arrival_rate) + "_seed" + std::to_string(rec.seed);
}

inline void write_rows_csv(std::ostream& os, const RunRecord& rec) {
  os << "id,arrival,lifetime,size,phase,accepted,revenue,cost,r2c,solve_seconds,failure_reason\n";
  for (const auto& r : rec.rows)
    os << r.id << ',' << format_real(r.arrival) << ',' << format_real(r.lifetime) << ','
       << r.size << ',' << r.phase << ',' << (r.accepted ? 1 : 0) << ','
       << format_real(r.revenue) << ',' << format_real(r.cost) << ',' << format_real(r.r2c)
       << ',' << format_real(r.solve_seconds) << ','
       << (r.failure_reason ? std::string(to_string(*r.failure_reason)) : "") << '\n';
}

inline std::vector<RequestRow> read_rows_csv(std::istream& in) {
  std::vector<RequestRow> rows;
  std::string line;
  if (!std::getline(in, line)) throw FormatError("rows csv: missing header");
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() == 10) f.emplace_back();
    if (f.size() != 11) throw FormatError("rows csv:" + std::to_string(lineno) + ": expected 11 fields");
    RequestRow r;
    r.id = std::stoi(f[0]);
    r.arrival = std::stod(f[1]);
    r.lifetime = std::stod(f[2]);
    r.size = std::stoul(f[3]);
    r.phase = std::stoi(f[4]);
    r.accepted = f[5] == "1";
    r.revenue = std::stod(f[6]);
    r.cost = std::stod(f[7]);
    r.r2c = std::stod(f[8]);
    r.solve_seconds = std::stod(f[9]);
    if (!f[10].empty()) r.failure_reason = parse_failure_reason(f[10]);
    rows.push_back(r);
  }
  return rows;
}

inline json to_json(const MetricsSummary& m) {
  return {{"rac", m.rac},
          {"lrc", m.lrc},
          {"lrc_unit", "fraction"},
          {"lrc_undefined", m.lrc_undefined},
          {"lar", m.lar},
          {"ast", m.ast},
          {"horizon", m.horizon},
          {"total_revenue", m.total_revenue},
          {"requests", m.requests},
          {"accepted", m.accepted}};
}

inline json summary_json(const RunRecord& rec) {
  json j = {{"solver", rec.solver},
            {"topology", rec.topology},
            {"arrival_rate", rec.arrival_rate},
            {"seed", rec.seed},
            {"fingerprint", rec.fingerprint},
            {"metrics", to_json(rec.summary)},
            {"verification_rejects", rec.verification_rejects},
            {"restored", rec.restored}};
  if (rec.energy) j["energy"] = *rec.energy;
  return j;
}

}  // namespace nfvra
