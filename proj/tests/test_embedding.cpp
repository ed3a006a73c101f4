#include <gtest/gtest.h>

#include "helpers.hpp"
#include "nfvra/embedding.hpp"
#include "nfvra/solvers/ranking.hpp"

using namespace nfvra;
using namespace nfvra::fixtures;

namespace {

Solution feasible_solution(const VirtualNetworkRequest& vn, std::vector<NodeId> nodes,
                           std::vector<std::vector<NodeId>> paths) {
  Solution s = Solution::empty_for(vn);
  s.node_mapping = std::move(nodes);
  s.link_mapping = std::move(paths);
  s.feasible = true;
  finalize(vn, s);
  return s;
}

}  // namespace

TEST(Evaluate, SingleNodeWithoutLinksHasUnitRatio) {
  VirtualNetworkRequest vn = make_vn(0, 1, {}, {10}, {});
  const auto s = feasible_solution(vn, {0}, {});
  EXPECT_EQ(s.revenue, 10.0);
  EXPECT_EQ(s.cost, 10.0);
  EXPECT_EQ(s.r2c, 1.0);
}

TEST(Evaluate, TwoHopLinkInflatesCost) {
  const auto vn = make_vn(0, 2, {{0, 1}}, {5, 5}, {10});
  const auto s = feasible_solution(vn, {0, 2}, {{0, 1, 2}});
  EXPECT_EQ(s.revenue, 20.0);
  EXPECT_EQ(s.cost, 30.0);
  EXPECT_DOUBLE_EQ(s.r2c, 2.0 / 3.0);
}

TEST(Evaluate, InfeasibleHasZeroRatio) {
  const auto vn = make_vn(0, 2, {{0, 1}}, {5, 5}, {10});
  Solution s = Solution::empty_for(vn);
  s.node_mapping = {0, 1};
  s.fail(FailureReason::link_resource);
  finalize(vn, s);
  EXPECT_EQ(s.r2c, 0.0);
  EXPECT_EQ(evaluate_solution(vn, s).r2c, 0.0);
}

TEST(Evaluate, FeasibleButIncompleteIsInternalError) {
  const auto vn = make_vn(0, 2, {{0, 1}}, {5, 5}, {10});
  Solution s = Solution::empty_for(vn);
  s.feasible = true;
  EXPECT_THROW(evaluate_solution(vn, s), InternalError);
}

TEST(Evaluate, HeterogeneousRevenueSumsAllKinds) {
  VirtualNetworkRequest vn = make_vn(0, 2, {{0, 1}}, {1, 2}, {4});
  vn.node_kinds.push_back("gpu");
  vn.node_demand.push_back({3, 5});
  EXPECT_EQ(total_revenue(vn), 1 + 2 + 3 + 5 + 4.0);
}

TEST(Route, SkipsCandidateWithoutBandwidth) {
  // Square 0-1-3 / 0-2-3: first candidate via 1 has 5 available, second via 2 has 50.
  auto pn = make_pn(4, {{0, 1}, {1, 3}, {0, 2}, {2, 3}}, {9, 9, 9, 9}, {5, 5, 50, 50});
  const auto path = route_virtual_link_detailed(pn, 10, std::nullopt, 0, 3, 10).path;
  ASSERT_TRUE(path);
  EXPECT_EQ(path->nodes, (std::vector<NodeId>{0, 2, 3}));
}

TEST(Route, ZeroDemandTakesShortestPath) {
  auto pn = make_pn(3, {{0, 1}, {1, 2}, {0, 2}}, {9, 9, 9}, {0, 0, 0});
  const auto path = route_virtual_link_detailed(pn, 0, std::nullopt, 0, 2, 10).path;
  ASSERT_TRUE(path);
  EXPECT_EQ(path->nodes, (std::vector<NodeId>{0, 2}));
}

TEST(Route, LatencyFilterPrefersSlowerButCompliantPath) {
  // Direct link 0-2 with latency 120; detour 0-1-2 at 40 + 40.
  auto pn = make_pn(3, {{0, 2}, {0, 1}, {1, 2}}, {9, 9, 9}, {100, 100, 100}, {120, 40, 40});
  const auto r = route_virtual_link_detailed(pn, 1, 100.0, 0, 2, 10);
  ASSERT_TRUE(r.path);
  EXPECT_EQ(r.path->nodes, (std::vector<NodeId>{0, 1, 2}));
  const auto strict = route_virtual_link_detailed(pn, 1, 50.0, 0, 2, 10);
  EXPECT_FALSE(strict.path);
  EXPECT_EQ(strict.reason, FailureReason::latency);
}

TEST(Route, ReasonsDistinguishBandwidthAndConnectivity) {
  auto pn = make_pn(3, {{0, 1}}, {9, 9, 9}, {5});
  EXPECT_EQ(route_virtual_link_detailed(pn, 10, std::nullopt, 0, 1, 10).reason,
            FailureReason::link_resource);
  EXPECT_EQ(route_virtual_link_detailed(pn, 1, std::nullopt, 0, 2, 10).reason,
            FailureReason::connectivity);
}

TEST(Route, KLimitsCandidates) {
  auto pn = make_pn(4, {{0, 1}, {1, 3}, {0, 2}, {2, 3}}, {9, 9, 9, 9}, {5, 5, 50, 50});
  EXPECT_FALSE(route_virtual_link_detailed(pn, 10, std::nullopt, 0, 3, 1).path);
}

TEST(Placement, Examples) {
  auto pn = make_pn(2, {{0, 1}}, {25, 25}, {10});
  const auto vn = make_vn(0, 2, {{0, 1}}, {20, 1}, {1});
  const std::vector<NodeId> empty{kUnmapped, kUnmapped};
  EXPECT_TRUE(check_node_placement(pn, vn, 0, 0, empty));
  const std::vector<NodeId> taken{kUnmapped, 0};
  EXPECT_FALSE(check_node_placement(pn, vn, 0, 0, taken));
}

TEST(Placement, EveryKindMustFit) {
  PhysicalAttributes attrs;
  attrs.node_kinds = {"cpu", "gpu"};
  attrs.node_capacity = {{30, 30}, {3, 3}};
  attrs.link_capacity = {10};
  PhysicalNetwork pn(std::make_shared<Topology>(2, std::vector<Link>{{0, 1}}), attrs);
  VirtualNetworkRequest vn = make_vn(0, 2, {{0, 1}}, {20, 1}, {1});
  vn.node_kinds.push_back("gpu");
  vn.node_demand.push_back({5, 0});
  EXPECT_FALSE(check_node_placement(pn, vn, 0, 0, std::vector<NodeId>{kUnmapped, kUnmapped}));
  EXPECT_TRUE(check_node_placement(pn, vn, 1, 0, std::vector<NodeId>{kUnmapped, kUnmapped}));
}

TEST(Placement, UnknownKindIsConfigError) {
  auto pn = uniform_pn(2, {{0, 1}}, 10, 10);
  VirtualNetworkRequest vn = make_vn(0, 2, {{0, 1}}, {1, 1}, {1});
  vn.node_kinds = {"fpga"};
  EXPECT_THROW(check_node_placement(pn, vn, 0, 0, std::vector<NodeId>{kUnmapped, kUnmapped}),
               ConfigError);
}

TEST(Order, DemandDescendingWithIdTies) {
  const auto vn = make_vn(0, 4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}, {5, 9, 5, 1}, {1, 7, 3, 2});
  const auto order = embedding_order(vn);
  EXPECT_EQ(order.nodes, (std::vector<NodeId>{1, 0, 2, 3}));
  EXPECT_TRUE(order.links_at[0].empty());
  EXPECT_EQ(order.links_at[1], (std::vector<int>{0}));
  EXPECT_EQ(order.links_at[2], (std::vector<int>{1}));
  EXPECT_EQ(order.links_at[3], (std::vector<int>{2, 3}));
}

TEST(EmbedMapping, RoutesAgainstProgressiveReservations) {
  // Two virtual links of 30 over a path whose middle link holds 50: the
  // second must fail even though each alone fits.
  auto pn = uniform_pn(4, path_links(4), 100, 50);
  const auto vn = make_vn(0, 3, {{0, 1}, {1, 2}}, {1, 1, 1}, {30, 30});
  PhysicalNetwork scratch = pn;
  const std::vector<NodeId> mapping{0, 2, 1};
  const auto s = embed_mapping(scratch, vn, mapping, embedding_order(vn));
  EXPECT_FALSE(s.feasible);
  EXPECT_EQ(s.failure_reason, FailureReason::link_resource);
}

TEST(EmbedMapping, DuplicateHostIsOneToOneFailure) {
  auto pn = uniform_pn(3, path_links(3), 100, 50);
  const auto vn = make_vn(0, 2, {{0, 1}}, {1, 1}, {1});
  PhysicalNetwork scratch = pn;
  const std::vector<NodeId> mapping{1, 1};
  const auto s = embed_mapping(scratch, vn, mapping, embedding_order(vn));
  EXPECT_FALSE(s.feasible);
  EXPECT_EQ(s.failure_reason, FailureReason::one_to_one);
}

TEST(Verify, SolverOutputPasses) {
  auto pn = uniform_pn(5, complete_links(5), 100, 100);
  const auto vn = make_vn(0, 3, {{0, 1}, {1, 2}}, {10, 20, 30}, {5, 6});
  const Instance in{vn, pn, 0, 10};
  const auto s = solve_by_ranking(in, RankKind::grc);
  ASSERT_TRUE(s.feasible);
  const auto report = verify_solution(pn, vn, s);
  EXPECT_TRUE(report.all_pass()) << report.summary();
}

TEST(Verify, SharedHostFailsOneToOne) {
  auto pn = uniform_pn(3, path_links(3), 100, 100);
  const auto vn = make_vn(0, 2, {{0, 1}}, {1, 1}, {1});
  Solution s = Solution::empty_for(vn);
  s.node_mapping = {1, 1};
  s.link_mapping = {{1}};
  s.feasible = true;
  const auto report = verify_solution(pn, vn, s);
  EXPECT_FALSE(report.all_pass());
  EXPECT_EQ(report.reason(), FailureReason::one_to_one);
}

TEST(Verify, AggregateBandwidthOnSharedLink) {
  // Star VN centred on 0 with leaves on 1 and 2; both paths cross link 0-3.
  auto pn = make_pn(4, {{0, 3}, {1, 3}, {2, 3}}, {9, 9, 9, 9}, {50, 100, 100});
  const auto vn = make_vn(0, 3, {{0, 1}, {0, 2}}, {1, 1, 1}, {30, 30});
  const auto s = feasible_solution(vn, {0, 1, 2}, {{0, 3, 1}, {0, 3, 2}});
  const auto report = verify_solution(pn, vn, s);
  EXPECT_FALSE(report.all_pass());
  EXPECT_EQ(report.reason(), FailureReason::link_resource);
}

TEST(Verify, DetectsBrokenPaths) {
  auto pn = uniform_pn(4, path_links(4), 100, 100);
  const auto vn = make_vn(0, 2, {{0, 1}}, {1, 1}, {1});
  EXPECT_FALSE(verify_solution(pn, vn, feasible_solution(vn, {0, 2}, {{0, 2}})).all_pass());
  EXPECT_FALSE(verify_solution(pn, vn, feasible_solution(vn, {0, 2}, {{0, 1}})).all_pass());
  EXPECT_FALSE(verify_solution(pn, vn, feasible_solution(vn, {0, 1}, {{0, 1, 0, 1}})).all_pass());
  EXPECT_TRUE(verify_solution(pn, vn, feasible_solution(vn, {0, 2}, {{0, 1, 2}})).all_pass());
}

TEST(Verify, NodeCapacityAndLatency) {
  auto pn = make_pn(2, {{0, 1}}, {5, 50}, {100}, {30});
  const auto vn = make_vn(0, 2, {{0, 1}}, {10, 1}, {1}, {20});
  const auto report = verify_solution(pn, vn, feasible_solution(vn, {0, 1}, {{0, 1}}));
  EXPECT_EQ(report.reason(), FailureReason::node_resource);
  const auto swapped = verify_solution(pn, vn, feasible_solution(vn, {1, 0}, {{1, 0}}));
  EXPECT_EQ(swapped.reason(), FailureReason::latency);
}

TEST(Allocation, ReleaseRestoresBitIdentically) {
  auto pn = uniform_pn(5, complete_links(5), 77.3, 41.9);
  const auto vn = make_vn(3, 3, {{0, 1}, {1, 2}}, {10.1, 20.2, 3.3}, {5.5, 6.6});
  const Instance in{vn, pn, 0, 10};
  const auto s = solve_by_ranking(in, RankKind::nrm);
  ASSERT_TRUE(s.feasible);
  allocate(pn, vn, s);
  EXPECT_TRUE(pn.is_active(3));
  EXPECT_FALSE(pn.pristine());
  release(pn, vn, s);
  EXPECT_TRUE(pn.pristine());
  for (std::size_t n = 0; n < 5; ++n) EXPECT_EQ(pn.node_available(0, NodeId(n)), 77.3);
}

TEST(Allocation, ThreeHopPathChargesEveryLink) {
  auto pn = uniform_pn(4, path_links(4), 100, 100);
  const auto vn = make_vn(0, 2, {{0, 1}}, {1, 1}, {10});
  allocate(pn, vn, feasible_solution(vn, {0, 3}, {{0, 1, 2, 3}}));
  for (LinkId l = 0; l < 3; ++l) EXPECT_EQ(pn.link_available(l), 90.0);
}

TEST(Allocation, SharedHostAccumulatesAcrossRequests) {
  auto pn = uniform_pn(2, {{0, 1}}, 100, 100);
  const auto a = make_vn(1, 2, {{0, 1}}, {10, 1}, {1});
  const auto b = make_vn(2, 2, {{0, 1}}, {15, 1}, {1});
  allocate(pn, a, feasible_solution(a, {0, 1}, {{0, 1}}));
  allocate(pn, b, feasible_solution(b, {0, 1}, {{0, 1}}));
  EXPECT_EQ(pn.node_available(0, 0), 75.0);
}

TEST(Allocation, InfeasibleAllocationRejectedWithReport) {
  auto pn = uniform_pn(2, {{0, 1}}, 5, 100);
  const auto vn = make_vn(0, 2, {{0, 1}}, {10, 1}, {1});
  try {
    allocate(pn, vn, feasible_solution(vn, {0, 1}, {{0, 1}}));
    FAIL() << "expected AllocationError";
  } catch (const AllocationError& e) {
    EXPECT_EQ(e.report().reason(), FailureReason::node_resource);
  }
  EXPECT_TRUE(pn.pristine());
}

TEST(Allocation, DoubleReleaseIsStateError) {
  auto pn = uniform_pn(2, {{0, 1}}, 100, 100);
  const auto vn = make_vn(0, 2, {{0, 1}}, {10, 1}, {1});
  const auto s = feasible_solution(vn, {0, 1}, {{0, 1}});
  allocate(pn, vn, s);
  release(pn, vn, s);
  EXPECT_THROW(release(pn, vn, s), StateError);
  allocate(pn, vn, s);
  EXPECT_THROW(allocate(pn, vn, s), StateError);
}

TEST(Record, RoundTripsExactly) {
  const auto vn = make_vn(12, 3, {{0, 1}, {1, 2}}, {0.1, 1.0 / 3.0, 7}, {2.5, 1e-7});
  const auto s = feasible_solution(vn, {4, 0, 2}, {{4, 3, 0}, {0, 2}});
  const auto line = to_record(s);
  const auto back = parse_record(line);
  EXPECT_EQ(back.request_id, 12);
  EXPECT_EQ(back.node_mapping, s.node_mapping);
  EXPECT_EQ(back.link_mapping, s.link_mapping);
  EXPECT_EQ(back.revenue, s.revenue);
  EXPECT_EQ(back.cost, s.cost);
  EXPECT_EQ(back.r2c, s.r2c);
  EXPECT_TRUE(back.feasible);
  EXPECT_EQ(to_record(back), line);
}

TEST(Record, FailureReasonRoundTrips) {
  const auto vn = make_vn(1, 2, {{0, 1}}, {1, 1}, {1});
  Solution s = Solution::empty_for(vn);
  s.fail(FailureReason::latency);
  finalize(vn, s);
  const auto back = parse_record(to_record(s));
  EXPECT_EQ(back.failure_reason, FailureReason::latency);
  EXPECT_FALSE(back.feasible);
}

TEST(Record, GarbageIsFormatError) {
  EXPECT_THROW(parse_record("id=x feasible=1"), FormatError);
  EXPECT_THROW(parse_record(""), FormatError);
}
