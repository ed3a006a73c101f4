#pragma once

// Population and trajectory meta-heuristics over node-assignment vectors
// (virtual node index -> physical node). Fitness is the R2C obtained by
// routing the assignment in canonical order; infeasible candidates score
// -penalty per violation.

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "nfvra/random.hpp"
#include "nfvra/solvers/solver.hpp"

namespace nfvra {

enum class MetaKind { ga, pso, aco, sa, ts };

inline std::string_view to_string(MetaKind k) {
  switch (k) {
    case MetaKind::ga: return "ga";
    case MetaKind::pso: return "pso";
    case MetaKind::aco: return "aco";
    case MetaKind::sa: return "sa";
    case MetaKind::ts: return "ts";
  }
  return "?";
}

struct MetaConfig {
  double penalty = 0.01;

  int population = 40;
  int generations = 60;
  int tournament = 3;
  double crossover_rate = 0.9;
  double mutation_rate = 0.1;

  int swarm = 30;
  int pso_iterations = 60;
  double inertia = 0.1;    // keep own gene
  double cognitive = 0.3;  // copy personal best
  double social = 0.5;     // copy global best; remainder: random gene

  int ants = 20;
  int aco_iterations = 50;
  double evaporation = 0.5;
  double pheromone_weight = 1.0;
  double heuristic_weight = 2.0;

  double initial_temperature = 1.0;
  double cooling = 0.95;
  int sa_steps = 500;

  int tabu_tenure = 10;
  int neighborhood = 20;
  int ts_iterations = 200;

  void validate() const {
    auto positive = [](double v, const char* field) {
      if (!(v > 0.0)) throw ConfigError(std::string("solvers.meta.") + field, "must be > 0");
    };
    auto non_negative = [](double v, const char* field) {
      if (!(v >= 0.0)) throw ConfigError(std::string("solvers.meta.") + field, "must be >= 0");
    };
    auto probability = [](double v, const char* field) {
      if (!(v >= 0.0 && v <= 1.0))
        throw ConfigError(std::string("solvers.meta.") + field, "must lie in [0, 1]");
    };
    non_negative(penalty, "penalty");
    positive(population, "population");
    non_negative(generations, "generations");
    positive(tournament, "tournament");
    probability(crossover_rate, "crossover_rate");
    probability(mutation_rate, "mutation_rate");
    positive(swarm, "swarm");
    non_negative(pso_iterations, "pso_iterations");
    probability(inertia, "inertia");
    probability(cognitive, "cognitive");
    probability(social, "social");
    if (inertia + cognitive + social > 1.0 + 1e-12)
      throw ConfigError("solvers.meta.social", "inertia + cognitive + social must be <= 1");
    positive(ants, "ants");
    non_negative(aco_iterations, "aco_iterations");
    probability(evaporation, "evaporation");
    non_negative(pheromone_weight, "pheromone_weight");
    non_negative(heuristic_weight, "heuristic_weight");
    non_negative(initial_temperature, "initial_temperature");
    probability(cooling, "cooling");
    non_negative(sa_steps, "sa_steps");
    non_negative(tabu_tenure, "tabu_tenure");
    positive(neighborhood, "neighborhood");
    non_negative(ts_iterations, "ts_iterations");
  }
};

using Assignment = std::vector<NodeId>;

struct AssignmentHash {
  std::size_t operator()(const Assignment& a) const {
    std::uint64_t h = 1469598103934665603ULL;
    for (NodeId p : a) h = splitmix64(h ^ std::uint64_t(std::uint32_t(p)));
    return std::size_t(h);
  }
};

// Memoized fitness with best-candidate tracking.
class FitnessEvaluator {
 public:
  FitnessEvaluator(const Instance& in, double penalty)
      : in_(in), penalty_(penalty), order_(embedding_order(in.vn)) {
    demand_.resize(in.vn.node_count);
    for (std::size_t v = 0; v < in.vn.node_count; ++v)
      demand_[v] = demand_vector(in.pn, in.vn, NodeId(v));
  }

  double operator()(const Assignment& genes) {
    auto it = memo_.find(genes);
    if (it != memo_.end()) return it->second;
    const double f = compute(genes);
    memo_.emplace(genes, f);
    ++evaluations_;
    if (!best_ || f > best_fitness_) {
      best_fitness_ = f;
      best_ = genes;
    }
    return f;
  }

  double best_fitness() const { return best_fitness_; }
  const std::optional<Assignment>& best() const { return best_; }
  std::size_t evaluations() const { return evaluations_; }
  const EmbeddingOrder& order() const { return order_; }

  Solution best_solution() const {
    if (!best_) return infeasible(in_.vn, FailureReason::unplaced);
    return complete_mapping(in_, *best_, order_);
  }

 private:
  double compute(const Assignment& genes) const {
    const auto& vn = in_.vn;
    const auto& pn = in_.pn;
    int violations = 0;
    std::vector<int> hosted(pn.node_count(), 0);
    for (std::size_t v = 0; v < genes.size(); ++v) {
      if (hosted[genes[v]]++ > 0) ++violations;
      if (!fits_node(pn, demand_[v], genes[v])) ++violations;
    }
    if (violations > 0) return -penalty_ * violations;
    PhysicalNetwork scratch = pn;
    for (std::size_t v = 0; v < genes.size(); ++v) scratch.reserve_node(genes[v], demand_[v]);
    double routed_cost = 0.0;
    for (const auto& group : order_.links_at)
      for (int l : group) {
        const auto& link = vn.links[l];
        std::optional<double> limit;
        if (vn.has_latency_limits()) limit = vn.latency_limit[l];
        auto r = route_virtual_link_detailed(scratch, vn.link_demand[l], limit, genes[link.u],
                                             genes[link.v], in_.k_paths);
        if (!r.path) {
          ++violations;
          continue;
        }
        reserve_path(scratch, *r.path, vn.link_demand[l]);
        routed_cost += double(r.path->hops()) * vn.link_demand[l];
      }
    if (violations > 0) return -penalty_ * violations;
    double node_sum = 0.0, bw_sum = 0.0;
    for (std::size_t v = 0; v < vn.node_count; ++v) node_sum += vn.total_node_demand(NodeId(v));
    for (double b : vn.link_demand) bw_sum += b;
    const double cost = node_sum + routed_cost;
    return cost > 0.0 ? (node_sum + bw_sum) / cost : 1.0;
  }

  const Instance& in_;
  double penalty_;
  EmbeddingOrder order_;
  std::vector<std::vector<double>> demand_;
  std::unordered_map<Assignment, double, AssignmentHash> memo_;
  std::optional<Assignment> best_;
  double best_fitness_ = 0.0;
  std::size_t evaluations_ = 0;
};

namespace detail {

// Injective when the substrate has enough nodes.
inline Assignment random_assignment(std::size_t nv, std::size_t np, Rng& rng) {
  Assignment a(nv);
  if (np >= nv) {
    std::vector<NodeId> pool(np);
    std::iota(pool.begin(), pool.end(), 0);
    for (std::size_t i = 0; i < nv; ++i) {
      const std::size_t j = i + uniform_index(rng, np - i);
      std::swap(pool[i], pool[j]);
      a[i] = pool[i];
    }
  } else {
    for (auto& g : a) g = NodeId(uniform_index(rng, np));
  }
  return a;
}

inline Assignment reassign_one(Assignment a, std::size_t np, Rng& rng) {
  if (a.empty() || np < 2) return a;
  const std::size_t v = uniform_index(rng, a.size());
  NodeId p = NodeId(uniform_index(rng, np - 1));
  if (p >= a[v]) ++p;
  a[v] = p;
  return a;
}

inline void run_ga(FitnessEvaluator& fit, const MetaConfig& c, std::size_t nv, std::size_t np, Rng& rng) {
  std::vector<Assignment> pop(std::size_t(c.population));
  std::vector<double> score(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) {
    pop[i] = random_assignment(nv, np, rng);
    score[i] = fit(pop[i]);
  }
  auto tournament = [&]() -> const Assignment& {
    std::size_t best = uniform_index(rng, pop.size());
    for (int t = 1; t < c.tournament; ++t) {
      const std::size_t j = uniform_index(rng, pop.size());
      if (score[j] > score[best]) best = j;
    }
    return pop[best];
  };
  for (int g = 0; g < c.generations; ++g) {
    const std::size_t elite = std::size_t(std::max_element(score.begin(), score.end()) - score.begin());
    std::vector<Assignment> next{pop[elite]};
    while (next.size() < pop.size()) {
      const Assignment& a = tournament();
      const Assignment& b = tournament();
      Assignment child = a;
      if (uniform01(rng) < c.crossover_rate)
        for (std::size_t v = 0; v < nv; ++v)
          if (uniform01(rng) < 0.5) child[v] = b[v];
      for (std::size_t v = 0; v < nv; ++v)
        if (uniform01(rng) < c.mutation_rate) child[v] = NodeId(uniform_index(rng, np));
      next.push_back(std::move(child));
    }
    pop = std::move(next);
    for (std::size_t i = 0; i < pop.size(); ++i) score[i] = fit(pop[i]);
  }
}

inline void run_pso(FitnessEvaluator& fit, const MetaConfig& c, std::size_t nv, std::size_t np, Rng& rng) {
  std::vector<Assignment> pos(std::size_t(c.swarm)), pbest;
  std::vector<double> pscore(pos.size());
  for (std::size_t i = 0; i < pos.size(); ++i) {
    pos[i] = random_assignment(nv, np, rng);
    pscore[i] = fit(pos[i]);
  }
  pbest = pos;
  std::size_t g = std::size_t(std::max_element(pscore.begin(), pscore.end()) - pscore.begin());
  Assignment gbest = pbest[g];
  double gscore = pscore[g];
  for (int it = 0; it < c.pso_iterations; ++it) {
    for (std::size_t i = 0; i < pos.size(); ++i) {
      for (std::size_t v = 0; v < nv; ++v) {
        const double r = uniform01(rng);
        if (r < c.inertia) continue;
        if (r < c.inertia + c.cognitive)
          pos[i][v] = pbest[i][v];
        else if (r < c.inertia + c.cognitive + c.social)
          pos[i][v] = gbest[v];
        else
          pos[i][v] = NodeId(uniform_index(rng, np));
      }
      const double f = fit(pos[i]);
      if (f > pscore[i]) {
        pscore[i] = f;
        pbest[i] = pos[i];
      }
      if (f > gscore) {
        gscore = f;
        gbest = pos[i];
      }
    }
  }
}

inline void run_aco(FitnessEvaluator& fit, const MetaConfig& c, const Instance& in, Rng& rng) {
  const std::size_t nv = in.vn.node_count, np = in.pn.node_count();
  std::vector<std::vector<double>> tau(nv, std::vector<double>(np, 1.0));
  std::vector<std::vector<double>> eta(nv, std::vector<double>(np, 1e-3));
  double max_avail = 0.0;
  for (std::size_t p = 0; p < np; ++p) max_avail = std::max(max_avail, in.pn.node_available_total(NodeId(p)));
  for (std::size_t v = 0; v < nv; ++v) {
    const auto d = demand_vector(in.pn, in.vn, NodeId(v));
    for (std::size_t p = 0; p < np; ++p)
      if (fits_node(in.pn, d, NodeId(p)) && max_avail > 0.0)
        eta[v][p] = std::max(1e-3, in.pn.node_available_total(NodeId(p)) / max_avail);
  }
  const auto& order = fit.order().nodes;
  std::optional<Assignment> global;
  double global_score = 0.0;
  for (int it = 0; it < c.aco_iterations; ++it) {
    Assignment best_ant;
    double best_score = 0.0;
    for (int a = 0; a < c.ants; ++a) {
      Assignment genes(nv, kUnmapped);
      std::vector<char> used(np, 0);
      std::vector<double> w(np);
      for (NodeId v : order) {
        double total = 0.0;
        for (std::size_t p = 0; p < np; ++p) {
          w[p] = used[p] && np >= nv ? 0.0
                                     : std::pow(tau[v][p], c.pheromone_weight) *
                                           std::pow(eta[v][p], c.heuristic_weight);
          total += w[p];
        }
        std::size_t pick = 0;
        if (total > 0.0) {
          double r = uniform01(rng) * total;
          for (pick = 0; pick + 1 < np && r >= w[pick]; ++pick) r -= w[pick];
          while (w[pick] == 0.0) pick = (pick + np - 1) % np;
        } else {
          pick = uniform_index(rng, np);
        }
        genes[v] = NodeId(pick);
        used[pick] = 1;
      }
      const double f = fit(genes);
      if (best_ant.empty() || f > best_score) {
        best_ant = genes;
        best_score = f;
      }
    }
    if (!global || best_score > global_score) {
      global = best_ant;
      global_score = best_score;
    }
    for (auto& row : tau)
      for (auto& t : row) t *= 1.0 - c.evaporation;
    for (const auto* cand : {&best_ant, &*global}) {
      const double deposit = cand == &best_ant ? best_score : global_score;
      if (deposit > 0.0)
        for (std::size_t v = 0; v < nv; ++v) tau[v][(*cand)[v]] += deposit;
    }
    for (auto& row : tau)
      for (auto& t : row) t = std::max(t, 1e-3);
  }
}

inline void run_sa(FitnessEvaluator& fit, const MetaConfig& c, std::size_t nv, std::size_t np, Rng& rng) {
  Assignment cur = random_assignment(nv, np, rng);
  double f = fit(cur);
  double temperature = c.initial_temperature;
  for (int step = 0; step < c.sa_steps; ++step) {
    Assignment cand = reassign_one(cur, np, rng);
    const double g = fit(cand);
    const double delta = g - f;
    if (delta >= 0.0 || (temperature > 0.0 && uniform01(rng) < std::exp(delta / temperature))) {
      cur = std::move(cand);
      f = g;
    }
    temperature *= c.cooling;
  }
}

inline void run_ts(FitnessEvaluator& fit, const MetaConfig& c, std::size_t nv, std::size_t np, Rng& rng) {
  Assignment cur = random_assignment(nv, np, rng);
  fit(cur);
  AssignmentHash hash;
  std::deque<std::size_t> tabu{hash(cur)};
  for (int it = 0; it < c.ts_iterations; ++it) {
    std::optional<Assignment> chosen;
    double chosen_score = 0.0;
    for (int k = 0; k < c.neighborhood; ++k) {
      Assignment cand = reassign_one(cur, np, rng);
      const double incumbent = fit.best_fitness();
      const double g = fit(cand);
      const bool is_tabu = std::find(tabu.begin(), tabu.end(), hash(cand)) != tabu.end();
      if (is_tabu && !(g > incumbent)) continue;  // aspiration
      if (!chosen || g > chosen_score) {
        chosen = std::move(cand);
        chosen_score = g;
      }
    }
    if (!chosen) continue;
    cur = std::move(*chosen);
    tabu.push_back(hash(cur));
    while (tabu.size() > std::size_t(c.tabu_tenure)) tabu.pop_front();
  }
}

}  // namespace detail

inline Solution solve_meta(const Instance& in, MetaKind kind, const MetaConfig& cfg = {}) {
  cfg.validate();
  const std::size_t nv = in.vn.node_count, np = in.pn.node_count();
  Rng rng = make_stream(in.seed, std::string("meta_") + std::string(to_string(kind)));
  FitnessEvaluator fit(in, cfg.penalty);
  switch (kind) {
    case MetaKind::ga: detail::run_ga(fit, cfg, nv, np, rng); break;
    case MetaKind::pso: detail::run_pso(fit, cfg, nv, np, rng); break;
    case MetaKind::aco: detail::run_aco(fit, cfg, in, rng); break;
    case MetaKind::sa: detail::run_sa(fit, cfg, nv, np, rng); break;
    case MetaKind::ts: detail::run_ts(fit, cfg, nv, np, rng); break;
  }
  return fit.best_solution();
}

class MetaSolver : public Solver {
 public:
  MetaSolver(MetaKind kind, MetaConfig cfg = {}) : kind_(kind), cfg_(cfg) { cfg_.validate(); }
  std::string name() const override { return std::string(to_string(kind_)) + "_meta"; }
  Solution solve(const Instance& in) const override { return solve_meta(in, kind_, cfg_); }

 private:
  MetaKind kind_;
  MetaConfig cfg_;
};

}  // namespace nfvra
