#pragma once

// Batch runner and the three harnesses: offline solvability, generalization
// sweeps, scalability profiling.

#include <atomic>
#include <chrono>
#include <exception>
#include <map>
#include <mutex>
#include <thread>
#include <vector>

#include "nfvra/simulator.hpp"
#include "nfvra/solvers/registry.hpp"

namespace nfvra {

inline std::vector<std::uint64_t> default_seeds() {
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 0; s <= 9999; s += 1111) seeds.push_back(s);
  return seeds;
}

// Runs fn(i) for i in [0, n) on up to `threads` workers. The first exception
// is rethrown after all workers stop.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = unsigned(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

struct BatchJob {
  SimulationConfig cfg;
  std::string solver;
  std::uint64_t seed = 0;
};

// Results come back in job order regardless of scheduling.
inline std::vector<RunRecord> run_batch(const std::vector<BatchJob>& jobs, unsigned threads = 0) {
  std::vector<RunRecord> out(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t i) {
    const auto solver = make_solver(jobs[i].solver, jobs[i].cfg);
    out[i] = run_simulation(jobs[i].cfg, *solver, jobs[i].seed);
  });
  return out;
}

// Control solver that rejects everything.
class RejectingSolver : public Solver {
 public:
  std::string name() const override { return "reject_all"; }
  Solution solve(const Instance& in) const override {
    return infeasible(in.vn, FailureReason::unplaced);
  }
};

// ---------------------------------------------------------------------------
// Offline solvability

struct OfflineInstance {
  int size = 0;
  PhysicalNetwork pn;
  VirtualNetworkRequest vn;
};

struct OfflineInstanceSet {
  std::uint64_t seed = 0;
  int per_size = 20;
  std::vector<OfflineInstance> instances;

  // Content hash of every capacity, usage and demand in the set.
  std::string digest() const {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&](double x) { h = fnv1a64(format_real(x), h); };
    for (const auto& inst : instances) {
      const auto& pn = inst.pn;
      for (std::size_t k = 0; k < pn.node_kinds().size(); ++k)
        for (std::size_t n = 0; n < pn.node_count(); ++n) {
          mix(pn.node_capacity(k, NodeId(n)));
          mix(pn.node_used(k, NodeId(n)));
        }
      for (std::size_t l = 0; l < pn.link_count(); ++l) {
        mix(pn.link_capacity(LinkId(l)));
        mix(pn.link_used(LinkId(l)));
      }
      mix(double(inst.vn.node_count));
      for (const auto& l : inst.vn.links) {
        mix(l.u);
        mix(l.v);
      }
      for (const auto& row : inst.vn.node_demand)
        for (double d : row) mix(d);
      for (double d : inst.vn.link_demand) mix(d);
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }
};

// `per_size` instances for every VN size in [min_size, max_size]; each gets
// a freshly drawn substrate at full availability.
inline OfflineInstanceSet make_offline_set(const SimulationConfig& raw, std::uint64_t seed,
                                           int per_size = 20, int min_size = 2, int max_size = 10) {
  const SimulationConfig base = resolve_scenario(raw);
  validate(base);
  if (per_size < 1) throw ConfigError("offline.per_size", "must be >= 1");
  if (min_size < 2 || max_size < min_size) throw ConfigError("offline.sizes", "need 2 <= min <= max");
  OfflineInstanceSet set;
  set.seed = seed;
  set.per_size = per_size;
  const auto topo = build_topology(base, seed);
  int index = 0;
  for (int size = min_size; size <= max_size; ++size) {
    SimulationConfig cfg = base;
    cfg.vn_size = {size, size};
    cfg.phases.clear();
    for (int i = 0; i < per_size; ++i, ++index) {
      const auto pn_seed = stream_seed(seed, "offline_pn", std::uint64_t(index));
      auto pn = apply_resource_specs(topo, cfg.pn_resources, pn_seed, cfg.energy);
      auto vn = generate_request(cfg, stream_seed(seed, "offline_vn", std::uint64_t(index)), index);
      vn.arrival_time = 0.0;
      vn.lifetime = 1.0;
      set.instances.push_back({size, std::move(pn), std::move(vn)});
    }
  }
  return set;
}

struct OfflineCell {
  double mean_r2c = 0.0;
  int feasible = 0;
  int instances = 0;
  bool refused = false;
};

struct OfflineTable {
  std::vector<std::string> solvers;
  std::vector<int> sizes;
  std::map<std::string, std::map<int, OfflineCell>> cells;
};

inline OfflineTable offline_solvability(const OfflineInstanceSet& set,
                                        const std::vector<std::string>& solvers,
                                        const json& solver_options = json::object(),
                                        std::size_t k_paths = kDefaultPathCount,
                                        unsigned threads = 0) {
  OfflineTable table;
  table.solvers = solvers;
  for (const auto& inst : set.instances)
    if (table.sizes.empty() || table.sizes.back() != inst.size) table.sizes.push_back(inst.size);
  struct Result {
    double r2c = 0.0;
    bool feasible = false;
    bool refused = false;
  };
  std::vector<std::vector<Result>> results(solvers.size(), std::vector<Result>(set.instances.size()));
  parallel_for(solvers.size(), threads, [&](std::size_t s) {
    const auto solver = make_solver(solvers[s], solver_options.contains(solvers[s])
                                                    ? solver_options.at(solvers[s])
                                                    : json::object());
    for (std::size_t i = 0; i < set.instances.size(); ++i) {
      const auto& inst = set.instances[i];
      Instance in{inst.vn, inst.pn, std::uint64_t(i), k_paths};
      try {
        const Solution sol = solver->solve(in);
        results[s][i] = {sol.feasible ? sol.r2c : 0.0, sol.feasible, false};
      } catch (const SolverRefused&) {
        results[s][i].refused = true;
      }
    }
  });
  for (std::size_t s = 0; s < solvers.size(); ++s) {
    auto& row = table.cells[solvers[s]];
    for (std::size_t i = 0; i < set.instances.size(); ++i) {
      auto& cell = row[set.instances[i].size];
      const auto& r = results[s][i];
      if (r.refused) {
        cell.refused = true;
        continue;
      }
      ++cell.instances;
      cell.feasible += r.feasible;
      cell.mean_r2c += r.r2c;
    }
    for (auto& [size, cell] : row) {
      if (cell.refused) {
        cell.mean_r2c = 0.0;
        cell.instances = 0;
        cell.feasible = 0;
      } else if (cell.instances > 0) {
        cell.mean_r2c /= cell.instances;
      }
    }
  }
  return table;
}

inline void write_heatmap_csv(std::ostream& os, const OfflineTable& t) {
  os << "solver,vn_size,mean_r2c,feasible,instances,refused\n";
  for (const auto& s : t.solvers)
    for (int size : t.sizes) {
      const auto& c = t.cells.at(s).at(size);
      os << s << ',' << size << ',';
      if (c.refused)
        os << ",,,1\n";
      else
        os << format_real(c.mean_r2c) << ',' << c.feasible << ',' << c.instances << ",0\n";
    }
}

// ---------------------------------------------------------------------------
// Generalization sweeps

struct SweepPoint {
  std::string solver;
  std::string label;
  double arrival_rate = 0.0;
  std::vector<std::uint64_t> seeds;
  std::vector<MetricsSummary> per_seed;

  double mean_rac() const {
    std::vector<double> v;
    for (const auto& m : per_seed) v.push_back(m.rac);
    return mean(v);
  }
  double mean_lrc() const {
    std::vector<double> v;
    for (const auto& m : per_seed) v.push_back(m.lrc);
    return mean(v);
  }
  double mean_ast() const {
    std::vector<double> v;
    for (const auto& m : per_seed) v.push_back(m.ast);
    return mean(v);
  }
};

inline std::vector<double> default_eta_axis() { return {0.04, 0.08, 0.12, 0.16, 0.20, 0.24, 0.28}; }

inline std::vector<SweepPoint> arrival_rate_sweep(const SimulationConfig& base,
                                                  const std::vector<double>& etas,
                                                  const std::vector<std::string>& solvers,
                                                  const std::vector<std::uint64_t>& seeds,
                                                  unsigned threads = 0,
                                                  std::vector<RunRecord>* records = nullptr) {
  for (double eta : etas)
    if (!(eta > 0.0)) throw ConfigError("sweep.arrival_rate", "every eta must be > 0");
  std::vector<BatchJob> jobs;
  for (const auto& s : solvers)
    for (double eta : etas)
      for (auto seed : seeds) {
        SimulationConfig cfg = base;
        cfg.arrival_rate = eta;
        jobs.push_back({cfg, s, seed});
      }
  const auto recs = run_batch(jobs, threads);
  std::vector<SweepPoint> points;
  std::size_t j = 0;
  for (const auto& s : solvers)
    for (double eta : etas) {
      SweepPoint p{s, "eta=" + format_rate(eta), eta, seeds, {}};
      for (std::size_t k = 0; k < seeds.size(); ++k) p.per_seed.push_back(recs[j++].summary);
      points.push_back(std::move(p));
    }
  if (records) *records = recs;
  return points;
}

// Runs the four-phase fluctuating-demand schedule and reports one point per
// phase (metrics over the requests drawn in that phase).
inline std::vector<SweepPoint> demand_phase_sweep(const SimulationConfig& base,
                                                  const std::vector<std::string>& solvers,
                                                  const std::vector<std::uint64_t>& seeds,
                                                  unsigned threads = 0,
                                                  std::vector<RunRecord>* records = nullptr) {
  SimulationConfig cfg = base;
  cfg.phases = fluctuating_demand_phases(std::max(1, cfg.vn_count / 4));
  std::vector<BatchJob> jobs;
  for (const auto& s : solvers)
    for (auto seed : seeds) jobs.push_back({cfg, s, seed});
  const auto recs = run_batch(jobs, threads);
  std::vector<SweepPoint> points;
  std::size_t j = 0;
  for (const auto& s : solvers) {
    std::vector<SweepPoint> phase_points;
    for (std::size_t p = 1; p <= cfg.phases.size(); ++p)
      phase_points.push_back({s, "phase" + std::to_string(p), cfg.arrival_rate, seeds, {}});
    for (std::size_t k = 0; k < seeds.size(); ++k, ++j) {
      const double horizon = horizon_of(recs[j].rows);
      for (std::size_t p = 1; p <= cfg.phases.size(); ++p) {
        std::vector<RequestRow> rows;
        for (const auto& r : recs[j].rows)
          if (r.phase == int(p)) rows.push_back(r);
        phase_points[p - 1].per_seed.push_back(compute_metrics(rows, horizon));
      }
    }
    for (auto& pp : phase_points) points.push_back(std::move(pp));
  }
  if (records) *records = recs;
  return points;
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& points) {
  os << "solver,point,arrival_rate,seed,rac,lrc,lar,ast\n";
  for (const auto& p : points)
    for (std::size_t k = 0; k < p.per_seed.size(); ++k) {
      const auto& m = p.per_seed[k];
      os << p.solver << ',' << p.label << ',' << format_real(p.arrival_rate) << ',' << p.seeds[k]
         << ',' << format_real(m.rac) << ',' << format_real(m.lrc) << ',' << format_real(m.lar)
         << ',' << format_real(m.ast) << '\n';
    }
}

// Spearman correlation between eta and seed-mean RAC over one solver's points.
inline double eta_rac_spearman(const std::vector<SweepPoint>& points, const std::string& solver) {
  std::vector<double> eta, rac;
  for (const auto& p : points)
    if (p.solver == solver) {
      eta.push_back(p.arrival_rate);
      rac.push_back(p.mean_rac());
    }
  return spearman(eta, rac);
}

// ---------------------------------------------------------------------------
// Scalability

struct ScaleOptions {
  std::vector<int> vn_sizes{5, 10, 15, 20, 25, 30};
  std::vector<int> pn_sizes{200, 400, 600, 800, 1000};
  int batch = 10;
  std::optional<double> time_limit;  // seconds; overruns are counted, not fatal
  std::uint64_t seed = 0;
};

struct ScalePoint {
  std::string solver;
  std::string axis;  // "vn_size" or "pn_size"
  int size = 0;
  double mean_seconds = 0.0;
  int instances = 0;
  int timeouts = 0;
  bool refused = false;
};

// Waxman link probability scaled with 100/n so the mean degree stays close
// to the WX100 preset's as the substrate grows.
inline SimulationConfig scaled_substrate(const SimulationConfig& base, int nodes) {
  SimulationConfig cfg = base;
  cfg.topology.kind = TopologySource::Kind::waxman;
  cfg.topology.num_nodes = nodes;
  cfg.topology.alpha = std::min(1.0, base.topology.alpha * 100.0 / nodes);
  cfg.topology.label = "wx" + std::to_string(nodes);
  return cfg;
}

inline std::vector<ScalePoint> scalability_profile(const SimulationConfig& raw,
                                                   const std::vector<std::string>& solvers,
                                                   const ScaleOptions& opt = {}) {
  const SimulationConfig base = resolve_scenario(raw);
  validate(base);
  std::vector<ScalePoint> out;
  auto measure = [&](const Solver& solver, const PhysicalNetwork& pn,
                     const std::vector<VirtualNetworkRequest>& batch, ScalePoint& point) {
    double total = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      Instance in{batch[i], pn, stream_seed(opt.seed, "scale", i), std::size_t(base.k_paths)};
      const auto start = std::chrono::steady_clock::now();
      try {
        (void)solver.solve(in);
      } catch (const SolverRefused&) {
        point.refused = true;
        return;
      } catch (const std::exception&) {
        ++point.timeouts;
      }
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (opt.time_limit && secs > *opt.time_limit) ++point.timeouts;
      total += secs;
      ++point.instances;
    }
    point.mean_seconds = point.instances ? total / point.instances : 0.0;
  };
  auto batch_for = [&](const SimulationConfig& cfg) {
    std::vector<VirtualNetworkRequest> batch;
    for (int i = 0; i < opt.batch; ++i)
      batch.push_back(generate_request(cfg, stream_seed(opt.seed, "scale_vn"), i));
    return batch;
  };
  for (const auto& name : solvers) {
    const auto solver = make_solver(name, base);
    const PhysicalNetwork pn = build_physical_network(base, opt.seed);
    bool truncated = false;
    for (int size : opt.vn_sizes) {
      ScalePoint point{name, "vn_size", size};
      if (!truncated) {
        SimulationConfig cfg = base;
        cfg.vn_size = {size, size};
        cfg.phases.clear();
        measure(*solver, pn, batch_for(cfg), point);
      } else {
        point.refused = true;
      }
      truncated = truncated || point.refused;
      out.push_back(point);
    }
    truncated = false;
    for (int size : opt.pn_sizes) {
      ScalePoint point{name, "pn_size", size};
      if (!truncated) {
        const SimulationConfig cfg = scaled_substrate(base, size);
        measure(*solver, build_physical_network(cfg, opt.seed), batch_for(cfg), point);
      } else {
        point.refused = true;
      }
      truncated = truncated || point.refused;
      out.push_back(point);
    }
  }
  return out;
}

inline void write_scale_csv(std::ostream& os, const std::vector<ScalePoint>& points) {
  os << "solver,axis,size,mean_seconds,instances,timeouts,refused\n";
  for (const auto& p : points)
    os << p.solver << ',' << p.axis << ',' << p.size << ',' << format_real(p.mean_seconds) << ','
       << p.instances << ',' << p.timeouts << ',' << (p.refused ? 1 : 0) << '\n';
}

}  // namespace nfvra
