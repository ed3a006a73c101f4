#pragma once

#include <memory>
#include <string>
#include <vector>

#include "nfvra/config.hpp"
#include "nfvra/solvers/exact.hpp"
#include "nfvra/solvers/mcts.hpp"
#include "nfvra/solvers/meta.hpp"
#include "nfvra/solvers/ranking.hpp"
#include "nfvra/solvers/rw_bfs.hpp"

namespace nfvra {

inline std::vector<std::string> solver_names() {
  return {"grc_rank", "nrm_rank", "rw_rank", "nea_rank", "pl_rank", "rw_bfs", "ga_meta",
          "pso_meta", "aco_meta", "sa_meta", "ts_meta", "mcts", "exact"};
}

namespace detail {

template <typename T>
void read_field(const json& block, const std::string& prefix, const char* key, T& out) {
  if (!block.contains(key)) return;
  try {
    out = block.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(prefix + "." + key, "wrong type");
  }
}

inline void reject_unknown(const json& block, const std::string& prefix,
                           std::initializer_list<const char*> known) {
  for (const auto& [key, value] : block.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ConfigError(prefix + "." + key, "unknown solver option");
  }
}

inline MetaConfig meta_config(const json& block, const std::string& prefix) {
  MetaConfig c;
  reject_unknown(block, prefix,
                 {"penalty", "population", "generations", "tournament", "crossover_rate",
                  "mutation_rate", "swarm", "pso_iterations", "inertia", "cognitive", "social",
                  "ants", "aco_iterations", "evaporation", "pheromone_weight", "heuristic_weight",
                  "initial_temperature", "cooling", "sa_steps", "tabu_tenure", "neighborhood",
                  "ts_iterations"});
  read_field(block, prefix, "penalty", c.penalty);
  read_field(block, prefix, "population", c.population);
  read_field(block, prefix, "generations", c.generations);
  read_field(block, prefix, "tournament", c.tournament);
  read_field(block, prefix, "crossover_rate", c.crossover_rate);
  read_field(block, prefix, "mutation_rate", c.mutation_rate);
  read_field(block, prefix, "swarm", c.swarm);
  read_field(block, prefix, "pso_iterations", c.pso_iterations);
  read_field(block, prefix, "inertia", c.inertia);
  read_field(block, prefix, "cognitive", c.cognitive);
  read_field(block, prefix, "social", c.social);
  read_field(block, prefix, "ants", c.ants);
  read_field(block, prefix, "aco_iterations", c.aco_iterations);
  read_field(block, prefix, "evaporation", c.evaporation);
  read_field(block, prefix, "pheromone_weight", c.pheromone_weight);
  read_field(block, prefix, "heuristic_weight", c.heuristic_weight);
  read_field(block, prefix, "initial_temperature", c.initial_temperature);
  read_field(block, prefix, "cooling", c.cooling);
  read_field(block, prefix, "sa_steps", c.sa_steps);
  read_field(block, prefix, "tabu_tenure", c.tabu_tenure);
  read_field(block, prefix, "neighborhood", c.neighborhood);
  read_field(block, prefix, "ts_iterations", c.ts_iterations);
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(prefix + e.field().substr(e.field().rfind('.')), e.what());
  }
  return c;
}

}  // namespace detail

// `options` is the solver's block from the config's "solvers" object (may be
// null or empty).
inline std::unique_ptr<Solver> make_solver(const std::string& name,
                                           const json& options = json::object()) {
  const json block = options.is_object() ? options : json::object();
  const std::string prefix = "solvers." + name;
  if (name == "grc_rank") return std::make_unique<RankingSolver>(RankKind::grc);
  if (name == "nrm_rank") return std::make_unique<RankingSolver>(RankKind::nrm);
  if (name == "rw_rank") return std::make_unique<RankingSolver>(RankKind::rw);
  if (name == "nea_rank") return std::make_unique<RankingSolver>(RankKind::nea);
  if (name == "pl_rank") return std::make_unique<RankingSolver>(RankKind::pl);
  if (name == "rw_bfs") {
    RwBfsConfig c;
    detail::reject_unknown(block, prefix, {"hop_budget", "max_retries"});
    detail::read_field(block, prefix, "hop_budget", c.hop_budget);
    detail::read_field(block, prefix, "max_retries", c.max_retries);
    if (c.hop_budget < 1) throw ConfigError(prefix + ".hop_budget", "must be >= 1");
    if (c.max_retries < 0) throw ConfigError(prefix + ".max_retries", "must be >= 0");
    return std::make_unique<RwBfsSolver>(c);
  }
  const std::pair<const char*, MetaKind> metas[] = {{"ga_meta", MetaKind::ga},
                                                    {"pso_meta", MetaKind::pso},
                                                    {"aco_meta", MetaKind::aco},
                                                    {"sa_meta", MetaKind::sa},
                                                    {"ts_meta", MetaKind::ts}};
  for (const auto& [label, kind] : metas)
    if (name == label) return std::make_unique<MetaSolver>(kind, detail::meta_config(block, prefix));
  if (name == "mcts") {
    MctsConfig c;
    detail::reject_unknown(block, prefix, {"simulations", "exploration"});
    detail::read_field(block, prefix, "simulations", c.simulations);
    detail::read_field(block, prefix, "exploration", c.exploration);
    if (c.simulations < 1) throw ConfigError(prefix + ".simulations", "must be >= 1");
    if (!(c.exploration > 0.0)) throw ConfigError(prefix + ".exploration", "must be > 0");
    return std::make_unique<MctsSolver>(c);
  }
  if (name == "exact") {
    ExactLimits c;
    detail::reject_unknown(block, prefix, {"max_virtual", "max_physical"});
    detail::read_field(block, prefix, "max_virtual", c.max_virtual);
    detail::read_field(block, prefix, "max_physical", c.max_physical);
    return std::make_unique<ExactSolver>(c);
  }
  std::string known;
  for (const auto& n : solver_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("solver", "unknown solver '" + name + "'; registered: " + known);
}

inline std::unique_ptr<Solver> make_solver(const std::string& name, const SimulationConfig& cfg) {
  return make_solver(name, cfg.solvers.contains(name) ? cfg.solvers.at(name) : json::object());
}

}  // namespace nfvra
