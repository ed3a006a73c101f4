#include <gtest/gtest.h>

#include "helpers.hpp"
#include "nfvra/generators.hpp"
#include "nfvra/solvers/registry.hpp"

using namespace nfvra;
using namespace nfvra::fixtures;

namespace {

// Dense solve of A x = b by Gaussian elimination with partial pivoting.
std::vector<double> gauss_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    std::swap(a[c], a[p]);
    std::swap(b[c], b[p]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

struct SmallInstance {
  PhysicalNetwork pn;
  VirtualNetworkRequest vn;
};

SmallInstance random_small_instance(std::uint64_t seed) {
  Rng rng(seed);
  const int np = 4 + int(uniform_index(rng, 6));
  const int nv = 2 + int(uniform_index(rng, 3));
  auto links = generate_connected_er(np, 0.4, rng);
  std::vector<double> cpu(np), bw(links.size());
  for (auto& c : cpu) c = 10 + 40 * uniform01(rng);
  for (auto& b : bw) b = 20 + 60 * uniform01(rng);
  auto vlinks = generate_connected_er(nv, 0.5, rng);
  std::vector<double> vc(nv), vb(vlinks.size());
  for (auto& c : vc) c = 20 * uniform01(rng);
  for (auto& b : vb) b = 50 * uniform01(rng);
  return {make_pn(std::size_t(np), links, cpu, bw), make_vn(0, std::size_t(nv), vlinks, vc, vb)};
}

}  // namespace

TEST(Ranking, GrcOnStarPutsCentreFirst) {
  const auto pn = uniform_pn(4, {{0, 1}, {0, 2}, {0, 3}}, 10, 10);
  const auto order = rank_nodes(RankKind::grc, physical_view(pn));
  EXPECT_EQ(order.front(), 0);
}

TEST(Ranking, GrcMatchesLinearSolve) {
  // Star with uneven weights: r = (1-d) c + d M r  =>  (I - d M) r = (1-d) c.
  const auto pn = make_pn(4, {{0, 1}, {0, 2}, {0, 3}}, {40, 10, 20, 30}, {5, 15, 30});
  const auto g = physical_view(pn);
  const auto r = rank_scores(RankKind::grc, g);
  const std::size_t n = 4;
  std::vector<double> out(n, 0.0), c(n);
  for (std::size_t l = 0; l < g.links.size(); ++l) {
    out[g.links[l].u] += g.link_weight[l];
    out[g.links[l].v] += g.link_weight[l];
  }
  const double total = 40 + 10 + 20 + 30;
  for (std::size_t v = 0; v < n; ++v) c[v] = g.node_weight[v] / total;
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (std::size_t v = 0; v < n; ++v) a[v][v] = 1.0;
  for (std::size_t l = 0; l < g.links.size(); ++l) {
    const auto u = std::size_t(g.links[l].u), v = std::size_t(g.links[l].v);
    a[u][v] -= kRankDamping * g.link_weight[l] / out[v];
    a[v][u] -= kRankDamping * g.link_weight[l] / out[u];
  }
  std::vector<double> b(n);
  for (std::size_t v = 0; v < n; ++v) b[v] = (1.0 - kRankDamping) * c[v];
  const auto expected = gauss_solve(a, b);
  for (std::size_t v = 0; v < n; ++v) EXPECT_NEAR(r[v], expected[v], 1e-6);
}

TEST(Ranking, NrmRewardsAdjacentBandwidth) {
  // Nodes 0 and 1 both have cpu 10; node 0 touches 100 units, node 1 50.
  const auto pn = make_pn(3, {{0, 2}, {1, 2}}, {10, 10, 10}, {100, 50});
  const auto s = rank_scores(RankKind::nrm, physical_view(pn));
  EXPECT_EQ(s[0], 1000.0);
  EXPECT_EQ(s[1], 500.0);
  EXPECT_GT(s[0], s[1]);
}

TEST(Ranking, RandomWalkIsUniformOnSymmetricCycle) {
  const auto pn = uniform_pn(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}}, 10, 10);
  const auto s = rank_scores(RankKind::rw, physical_view(pn));
  for (double v : s) EXPECT_NEAR(v, 0.2, 1e-9);
  EXPECT_EQ(rank_nodes(RankKind::rw, physical_view(pn)), (std::vector<NodeId>{0, 1, 2, 3, 4}));
}

TEST(Ranking, CentralityWeightedKindsFavourHub) {
  const auto pn = uniform_pn(4, {{0, 1}, {0, 2}, {0, 3}}, 10, 10);
  for (auto kind : {RankKind::nea, RankKind::pl, RankKind::nrm, RankKind::rw})
    EXPECT_EQ(rank_nodes(kind, physical_view(pn)).front(), 0) << to_string(kind);
}

TEST(Ranking, VirtualViewUsesDemands) {
  const auto vn = make_vn(0, 3, {{0, 1}, {1, 2}}, {1, 1, 9}, {5, 5});
  const auto s = rank_scores(RankKind::nrm, virtual_view(vn));
  EXPECT_EQ(s[2], 45.0);
  EXPECT_EQ(s[1], 10.0);
}

TEST(Ranking, FlatScoresKeepIdOrder) {
  EXPECT_EQ(ranking_from_scores({1.0, 1.0 + 1e-15, 1.0}), (std::vector<NodeId>{0, 1, 2}));
  EXPECT_EQ(ranking_from_scores({0.0, 2.0, 1.0}), (std::vector<NodeId>{1, 2, 0}));
}

TEST(Solvers, SingleNodeGoesToOnlyFeasibleHost) {
  const auto pn = make_pn(2, {{0, 1}}, {3, 10}, {10});
  const auto vn = make_vn(0, 1, {}, {5}, {});
  for (const auto& name : solver_names()) {
    const auto solver = make_solver(name);
    const auto s = solver->solve({vn, pn, 1, 10});
    ASSERT_TRUE(s.feasible) << name;
    EXPECT_EQ(s.node_mapping[0], 1) << name;
    EXPECT_EQ(s.r2c, 1.0) << name;
  }
}

TEST(Solvers, EveryoneFailsWhenNothingFits) {
  const auto pn = make_pn(3, path_links(3), {3, 3, 3}, {10, 10});
  const auto vn = make_vn(0, 2, {{0, 1}}, {5, 1}, {1});
  for (const auto& name : solver_names()) {
    const auto s = make_solver(name)->solve({vn, pn, 1, 10});
    EXPECT_FALSE(s.feasible) << name;
    EXPECT_EQ(s.r2c, 0.0) << name;
    EXPECT_TRUE(s.failure_reason.has_value()) << name;
  }
}

TEST(Solvers, ForcedAssignmentAgainstExact) {
  // Only node 1 can host virtual node 0; virtual node 1 fits anywhere.
  const auto pn = make_pn(3, path_links(3), {10, 30, 10}, {20, 20});
  const auto vn = make_vn(0, 2, {{0, 1}}, {25, 5}, {5});
  const auto exact = solve_exact({vn, pn, 0, 10});
  ASSERT_TRUE(exact.feasible);
  EXPECT_EQ(exact.node_mapping[0], 1);
  EXPECT_EQ(exact.r2c, 1.0);
  for (const auto& name : solver_names()) {
    const auto s = make_solver(name)->solve({vn, pn, 3, 10});
    if (!s.feasible) continue;
    EXPECT_EQ(s.node_mapping[0], 1) << name;
    EXPECT_LE(s.r2c, exact.r2c) << name;
  }
}

TEST(Exact, PrefersAdjacentHostsOnPath) {
  const auto pn = uniform_pn(3, path_links(3), 50, 50);
  const auto vn = make_vn(0, 2, {{0, 1}}, {5, 5}, {10});
  const auto s = solve_exact({vn, pn, 0, 10});
  ASSERT_TRUE(s.feasible);
  EXPECT_EQ(s.r2c, 1.0);
  EXPECT_EQ(s.link_mapping[0].size(), 2u);
}

TEST(Exact, RefusesLargeInstances) {
  const auto pn = uniform_pn(20, path_links(20), 50, 50);
  const auto vn = make_vn(0, 2, {{0, 1}}, {5, 5}, {10});
  EXPECT_THROW(solve_exact({vn, pn, 0, 10}), SolverRefused);
  const auto small = uniform_pn(6, path_links(6), 50, 50);
  const auto big_vn = make_vn(0, 6, path_links(6), {1, 1, 1, 1, 1, 1}, {1, 1, 1, 1, 1});
  EXPECT_THROW(solve_exact({big_vn, small, 0, 10}), SolverRefused);
}

TEST(Solvers, NeverBeatExactAndAlwaysVerify) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const auto inst = random_small_instance(seed);
    const auto exact = solve_exact({inst.vn, inst.pn, seed, 10});
    for (const auto& name : solver_names()) {
      const auto s = make_solver(name)->solve({inst.vn, inst.pn, seed, 10});
      EXPECT_LE(s.r2c, exact.r2c + 1e-12) << name << " seed " << seed;
      if (s.feasible) {
        const auto report = verify_solution(inst.pn, inst.vn, s);
        EXPECT_TRUE(report.all_pass()) << name << ": " << report.summary();
      } else {
        EXPECT_EQ(s.r2c, 0.0);
      }
    }
  }
}

TEST(Solvers, SeededRunsAreDeterministic) {
  const auto inst = random_small_instance(99);
  for (const auto& name : solver_names()) {
    const auto solver = make_solver(name);
    const auto a = solver->solve({inst.vn, inst.pn, 17, 10});
    const auto b = solver->solve({inst.vn, inst.pn, 17, 10});
    EXPECT_EQ(to_record(a), to_record(b)) << name;
  }
}

TEST(Solvers, SolveDoesNotMutateSnapshot) {
  const auto inst = random_small_instance(5);
  for (const auto& name : solver_names()) {
    (void)make_solver(name)->solve({inst.vn, inst.pn, 0, 10});
    EXPECT_TRUE(inst.pn.pristine()) << name;
  }
}

TEST(Meta, ZeroGenerationsStillReturnsValidResult) {
  const auto inst = random_small_instance(3);
  MetaConfig c;
  c.generations = 0;
  const auto s = solve_meta({inst.vn, inst.pn, 1, 10}, MetaKind::ga, c);
  if (s.feasible) {
    EXPECT_TRUE(verify_solution(inst.pn, inst.vn, s).all_pass());
  }
  EXPECT_EQ(s.node_mapping.size(), inst.vn.node_count);
}

TEST(Meta, ZeroTemperatureAnnealingIsGreedy) {
  const auto inst = random_small_instance(4);
  MetaConfig c;
  c.initial_temperature = 0.0;
  const auto s = solve_meta({inst.vn, inst.pn, 1, 10}, MetaKind::sa, c);
  if (s.feasible) {
    EXPECT_TRUE(verify_solution(inst.pn, inst.vn, s).all_pass());
  }
}

TEST(Meta, SingleVirtualNodeMatchesExhaustiveSearch) {
  const auto pn = make_pn(4, path_links(4), {3, 8, 12, 6}, {10, 10, 10});
  const auto vn = make_vn(0, 1, {}, {7}, {});
  for (auto kind : {MetaKind::ga, MetaKind::pso, MetaKind::aco, MetaKind::sa, MetaKind::ts}) {
    const auto s = solve_meta({vn, pn, 2, 10}, kind);
    ASSERT_TRUE(s.feasible) << to_string(kind);
    EXPECT_TRUE(s.node_mapping[0] == 1 || s.node_mapping[0] == 2) << to_string(kind);
  }
}

TEST(Meta, InvalidConfigIsRejected) {
  MetaConfig c;
  c.mutation_rate = 1.5;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.inertia = 0.5;
  c.cognitive = 0.5;
  c.social = 0.5;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Mcts, SingleSimulationBudgetStillCompletes) {
  const auto inst = random_small_instance(8);
  MctsConfig c;
  c.simulations = 1;
  const auto s = solve_mcts({inst.vn, inst.pn, 0, 10}, c);
  EXPECT_EQ(s.node_mapping.size(), inst.vn.node_count);
  if (s.feasible) {
    EXPECT_TRUE(verify_solution(inst.pn, inst.vn, s).all_pass());
  }
}

TEST(Mcts, FindsOptimumOnForcedPath) {
  // Hosts must be adjacent on the 4-path for R2C 1; MCTS should find it.
  const auto pn = make_pn(4, path_links(4), {30, 5, 30, 30}, {50, 50, 50});
  const auto vn = make_vn(0, 2, {{0, 1}}, {20, 10}, {10});
  const auto s = solve_mcts({vn, pn, 0, 10});
  ASSERT_TRUE(s.feasible);
  EXPECT_EQ(s.r2c, solve_exact({vn, pn, 0, 10}).r2c);
}

TEST(RwBfs, StarPlacesLeavesNearHub) {
  const auto pn = uniform_pn(7, {{0, 1}, {0, 2}, {0, 3}, {3, 4}, {4, 5}, {5, 6}}, 50, 100);
  const auto vn = make_vn(0, 3, {{0, 1}, {0, 2}}, {5, 5, 5}, {10, 10});
  const auto s = solve_rw_bfs({vn, pn, 0, 10});
  ASSERT_TRUE(s.feasible);
  const auto hop = bfs_distances(pn.topology().adjacency(), s.node_mapping[0]);
  EXPECT_LE(hop[s.node_mapping[1]], 2);
  EXPECT_LE(hop[s.node_mapping[2]], 2);
  EXPECT_TRUE(verify_solution(pn, vn, s).all_pass());
}

TEST(RwBfs, HopBudgetCanForceRejection) {
  // Only nodes 0 and 3 have capacity; they are 3 hops apart.
  const auto pn = make_pn(4, path_links(4), {10, 1, 1, 10}, {50, 50, 50});
  const auto vn = make_vn(0, 2, {{0, 1}}, {5, 5}, {1});
  EXPECT_FALSE(solve_rw_bfs({vn, pn, 0, 10}).feasible);
  RwBfsConfig wide;
  wide.hop_budget = 3;
  EXPECT_TRUE(solve_rw_bfs({vn, pn, 0, 10}, wide).feasible);
}

TEST(Registry, KnowsEverySolver) {
  for (const auto& name : solver_names()) EXPECT_EQ(make_solver(name)->name(), name);
}

TEST(Registry, UnknownSolverListsRegisteredNames) {
  try {
    make_solver("simplex");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "solver");
    EXPECT_NE(std::string(e.what()).find("grc_rank"), std::string::npos);
  }
}

TEST(Registry, OptionErrorsNameTheField) {
  auto field_of = [](const std::string& name, const json& opts) {
    try {
      make_solver(name, opts);
    } catch (const ConfigError& e) {
      return e.field();
    }
    return std::string("<accepted>");
  };
  EXPECT_EQ(field_of("ga_meta", {{"mutation", 0.2}}), "solvers.ga_meta.mutation");
  EXPECT_EQ(field_of("ga_meta", {{"mutation_rate", 2.0}}), "solvers.ga_meta.mutation_rate");
  EXPECT_EQ(field_of("mcts", {{"simulations", 0}}), "solvers.mcts.simulations");
  EXPECT_EQ(field_of("rw_bfs", {{"hop_budget", "two"}}), "solvers.rw_bfs.hop_budget");
  EXPECT_EQ(field_of("sa_meta", {{"sa_steps", 10}}), "<accepted>");
}
