#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "nfvra/generators.hpp"
#include "nfvra/metrics.hpp"

using namespace nfvra;

TEST(Config, DefaultsValidate) {
  EXPECT_NO_THROW(validate(default_config()));
  EXPECT_NO_THROW(validate(wx100_preset()));
}

TEST(Config, JsonRoundTripPreservesFingerprint) {
  SimulationConfig cfg = wx100_preset(0.2);
  cfg.scenario.heterogeneous = true;
  cfg.phases = fluctuating_demand_phases(100);
  cfg.solver_time_limit = 2.5;
  const auto back = config_from_json(to_json(cfg));
  EXPECT_EQ(fingerprint(back), fingerprint(cfg));
  EXPECT_EQ(back.phases.size(), 4u);
  EXPECT_EQ(*back.solver_time_limit, 2.5);
}

TEST(Config, FingerprintChangesWithSettings) {
  EXPECT_NE(fingerprint(wx100_preset(0.14)), fingerprint(wx100_preset(0.16)));
}

TEST(Config, ErrorsNameTheOffendingField) {
  auto expect_field = [](const json& j, const std::string& field) {
    try {
      config_from_json(j);
      ADD_FAILURE() << "accepted " << j.dump();
    } catch (const ConfigError& e) {
      EXPECT_EQ(e.field(), field) << e.what();
    }
  };
  expect_field({{"vn", {{"arrival_rate", -1.0}}}}, "vn.arrival_rate");
  expect_field({{"vn", {{"size", {{"low", 5}, {"high", 3}}}}}}, "vn.size");
  expect_field({{"vn", {{"count", "many"}}}}, "vn.count");
  expect_field({{"pn", {{"topology", {{"type", "ring"}}}}}}, "pn.topology.type");
  expect_field({{"pn", {{"node_attrs_setting", {{{"name", "cpu"}, {"low", 9}, {"high", 1}}}}}}},
               "pn.node_attrs_setting[0]");
  expect_field({{"schema_version", 7}}, "schema_version");
}

TEST(Config, UnreadableFileIsConfigError) {
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
  const auto path = std::filesystem::temp_directory_path() / "nfvra_bad.json";
  std::ofstream(path) << "{ not json";
  EXPECT_THROW(load_config(path.string()), ConfigError);
}

TEST(Config, ScenarioAddsResources) {
  SimulationConfig cfg = default_config();
  cfg.scenario.heterogeneous = true;
  cfg.scenario.latency_aware = true;
  const auto r = resolve_scenario(cfg);
  auto has = [](const std::vector<ResourceSpec>& v, const std::string& n) {
    return std::any_of(v.begin(), v.end(), [&](const ResourceSpec& s) { return s.name == n; });
  };
  EXPECT_TRUE(has(r.pn_resources, "gpu"));
  EXPECT_TRUE(has(r.pn_resources, "ram"));
  EXPECT_TRUE(has(r.pn_resources, "latency"));
  EXPECT_TRUE(has(r.vn_resources, "latency_limit"));
}

TEST(Waxman, DeterministicPerSeed) {
  const auto a = generate_waxman_topology(50, 0.5, 0.2, 3);
  const auto b = generate_waxman_topology(50, 0.5, 0.2, 3);
  const auto c = generate_waxman_topology(50, 0.5, 0.2, 4);
  EXPECT_EQ(a->links(), b->links());
  EXPECT_NE(a->links(), c->links());
}

TEST(Waxman, Wx100DensityNearFivePercent) {
  const auto pn = build_physical_network(wx100_preset(), 0);
  EXPECT_EQ(pn.node_count(), 100u);
  EXPECT_TRUE(pn.topology().connected());
  EXPECT_GE(pn.link_count(), 400u);
  EXPECT_LE(pn.link_count(), 600u);
}

TEST(Waxman, TwoNodesAreConnected) {
  const auto t = generate_waxman_topology(2, 0.01, 0.01, 0);
  EXPECT_EQ(t->link_count(), 1u);
}

TEST(Waxman, RejectsBadParameters) {
  EXPECT_THROW(generate_waxman_topology(1, 0.5, 0.2, 0), ConfigError);
  EXPECT_THROW(generate_waxman_topology(10, 0.0, 0.2, 0), ConfigError);
  EXPECT_THROW(generate_waxman_topology(10, 0.5, 1.5, 0), ConfigError);
}

TEST(Substrate, CapacitiesWithinDistribution) {
  const auto pn = build_physical_network(wx100_preset(), 0);
  for (std::size_t n = 0; n < pn.node_count(); ++n) {
    EXPECT_GE(pn.node_capacity(0, NodeId(n)), 50.0);
    EXPECT_LE(pn.node_capacity(0, NodeId(n)), 100.0);
  }
  for (std::size_t l = 0; l < pn.link_count(); ++l) {
    EXPECT_GE(pn.link_capacity(LinkId(l)), 50.0);
    EXPECT_LE(pn.link_capacity(LinkId(l)), 100.0);
  }
  EXPECT_TRUE(pn.pristine());
}

TEST(Substrate, ConstantSpecsAndHeterogeneousKinds) {
  SimulationConfig cfg = default_config();
  cfg.topology.num_nodes = 10;
  cfg.pn_resources = {{"cpu", ResourceLevel::node, Distribution::constant(7)},
                      {"bandwidth", ResourceLevel::link, Distribution::constant(3)}};
  cfg.scenario.heterogeneous = true;
  const auto pn = build_physical_network(cfg, 1);
  ASSERT_EQ(pn.node_kinds(), (std::vector<std::string>{"cpu", "gpu", "ram"}));
  for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(pn.node_capacity(k, 4), 7.0);
  EXPECT_EQ(pn.link_capacity(0), 3.0);
}

TEST(Requests, DeterministicAndWithinRanges) {
  SimulationConfig cfg = default_config();
  cfg.vn_count = 300;
  const auto a = generate_request_sequence(cfg, 5);
  const auto b = generate_request_sequence(cfg, 5);
  ASSERT_EQ(a.size(), 300u);
  double prev = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].links, b[i].links);
    EXPECT_EQ(a[i].node_demand, b[i].node_demand);
    EXPECT_EQ(a[i].arrival_time, b[i].arrival_time);
    EXPECT_GE(a[i].node_count, 2u);
    EXPECT_LE(a[i].node_count, 10u);
    EXPECT_GE(a[i].arrival_time, prev);
    prev = a[i].arrival_time;
    EXPECT_GT(a[i].lifetime, 0.0);
    EXPECT_NO_THROW(a[i].validate());
    for (double d : a[i].node_demand[0]) {
      EXPECT_GE(d, 0.0);
      EXPECT_LE(d, 20.0);
    }
    for (double d : a[i].link_demand) {
      EXPECT_GE(d, 0.0);
      EXPECT_LE(d, 50.0);
    }
  }
}

TEST(Requests, TinyArrivalRateGivesLongGaps) {
  SimulationConfig cfg = default_config();
  cfg.arrival_rate = 0.004;
  const auto reqs = generate_request_sequence(cfg, 0);
  const double mean_gap = reqs.back().arrival_time / double(reqs.size());
  EXPECT_NEAR(mean_gap, 250.0, 25.0);
}

TEST(Requests, FixedSizeAndFullEdgeProbabilityGiveOneLink) {
  SimulationConfig cfg = default_config();
  cfg.vn_count = 20;
  cfg.vn_size = {2, 2};
  cfg.vn_edge_prob = 1.0;
  for (const auto& vn : generate_request_sequence(cfg, 9)) {
    EXPECT_EQ(vn.node_count, 2u);
    ASSERT_EQ(vn.links.size(), 1u);
    EXPECT_EQ(vn.links[0], (Link{0, 1}));
  }
}

TEST(Requests, SparseEdgeProbabilityStillConnected) {
  SimulationConfig cfg = default_config();
  cfg.vn_count = 50;
  cfg.vn_edge_prob = 0.05;
  for (const auto& vn : generate_request_sequence(cfg, 2)) EXPECT_NO_THROW(vn.validate());
}

TEST(Requests, LatencyScenarioAttachesLimits) {
  SimulationConfig cfg = default_config();
  cfg.vn_count = 5;
  cfg.scenario.latency_aware = true;
  for (const auto& vn : generate_request_sequence(cfg, 0)) {
    ASSERT_TRUE(vn.has_latency_limits());
    for (double l : vn.latency_limit) EXPECT_EQ(l, kDefaultLatencyLimit);
  }
}

TEST(Requests, PhasesApplyByIndex) {
  SimulationConfig cfg = default_config();
  cfg.vn_count = 1000;
  cfg.phases = fluctuating_demand_phases(250);
  const auto reqs = generate_request_sequence(cfg, 0);
  EXPECT_EQ(reqs[0].phase, 1);
  EXPECT_EQ(reqs[249].phase, 1);
  EXPECT_EQ(reqs[250].phase, 2);
  EXPECT_EQ(reqs[999].phase, 4);
  const auto phase3 = request_shape(cfg, 600);
  EXPECT_EQ(phase3.phase, 3);
}

TEST(Requests, StreamsAreIndependentOfCount) {
  SimulationConfig a = default_config(), b = default_config();
  a.vn_count = 10;
  b.vn_count = 20;
  const auto ra = generate_request_sequence(a, 4), rb = generate_request_sequence(b, 4);
  for (std::size_t i = 0; i < ra.size(); ++i) {
    EXPECT_EQ(ra[i].links, rb[i].links);
    EXPECT_EQ(ra[i].arrival_time, rb[i].arrival_time);
  }
}

TEST(Random, StreamSeedsDiffer) {
  EXPECT_NE(stream_seed(1, "a"), stream_seed(1, "b"));
  EXPECT_NE(stream_seed(1, "a", 0), stream_seed(1, "a", 1));
  EXPECT_EQ(stream_seed(3, "x", 2), stream_seed(3, "x", 2));
}
