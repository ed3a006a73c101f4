#pragma once

#include <memory>
#include <vector>

#include "nfvra/network.hpp"

namespace nfvra::fixtures {

// Single-kind ("cpu") substrate with explicit capacities.
inline PhysicalNetwork make_pn(std::size_t n, std::vector<Link> links, std::vector<double> cpu,
                               std::vector<double> bandwidth, std::vector<double> latency = {}) {
  PhysicalAttributes attrs;
  attrs.node_kinds = {"cpu"};
  attrs.node_capacity = {std::move(cpu)};
  attrs.link_capacity = std::move(bandwidth);
  attrs.link_latency = std::move(latency);
  return PhysicalNetwork(std::make_shared<Topology>(n, std::move(links)), std::move(attrs));
}

inline PhysicalNetwork uniform_pn(std::size_t n, std::vector<Link> links, double cpu, double bw) {
  const std::size_t m = links.size();
  return make_pn(n, std::move(links), std::vector<double>(n, cpu), std::vector<double>(m, bw));
}

inline VirtualNetworkRequest make_vn(int id, std::size_t n, std::vector<Link> links,
                                     std::vector<double> cpu, std::vector<double> bandwidth,
                                     std::vector<double> latency_limit = {}) {
  VirtualNetworkRequest vn;
  vn.id = id;
  vn.node_count = n;
  vn.links = std::move(links);
  vn.node_kinds = {"cpu"};
  vn.node_demand = {std::move(cpu)};
  vn.link_demand = std::move(bandwidth);
  vn.latency_limit = std::move(latency_limit);
  return vn;
}

inline std::vector<Link> path_links(int n) {
  std::vector<Link> out;
  for (int i = 0; i + 1 < n; ++i) out.push_back({i, i + 1});
  return out;
}

inline std::vector<Link> complete_links(int n) {
  std::vector<Link> out;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) out.push_back({a, b});
  return out;
}

}  // namespace nfvra::fixtures
