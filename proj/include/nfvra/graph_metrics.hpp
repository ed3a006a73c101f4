#pragma once

// Unweighted graph analytics over plain adjacency lists: hop distances,
// connectivity and the four centralities used for ranking and features.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <stack>
#include <vector>

namespace nfvra {

using Adjacency = std::vector<std::vector<int>>;

inline constexpr int kUnreachable = std::numeric_limits<int>::max();

inline std::vector<int> bfs_distances(const Adjacency& adj, int source) {
  std::vector<int> dist(adj.size(), kUnreachable);
  std::queue<int> frontier;
  dist[source] = 0;
  frontier.push(source);
  while (!frontier.empty()) {
    int u = frontier.front();
    frontier.pop();
    for (int v : adj[u]) {
      if (dist[v] == kUnreachable) {
        dist[v] = dist[u] + 1;
        frontier.push(v);
      }
    }
  }
  return dist;
}

inline std::vector<int> connected_components(const Adjacency& adj) {
  std::vector<int> comp(adj.size(), -1);
  int next = 0;
  for (std::size_t s = 0; s < adj.size(); ++s) {
    if (comp[s] >= 0) continue;
    std::vector<int> stack{static_cast<int>(s)};
    comp[s] = next;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v : adj[u]) {
        if (comp[v] < 0) {
          comp[v] = next;
          stack.push_back(v);
        }
      }
    }
    ++next;
  }
  return comp;
}

inline bool is_connected(const Adjacency& adj) {
  if (adj.empty()) return true;
  auto comp = connected_components(adj);
  return std::all_of(comp.begin(), comp.end(), [](int c) { return c == 0; });
}

// deg(v) / (n - 1)
inline std::vector<double> degree_centrality(const Adjacency& adj) {
  const std::size_t n = adj.size();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  for (std::size_t v = 0; v < n; ++v) out[v] = double(adj[v].size()) / double(n - 1);
  return out;
}

// (reachable - 1) / sum of hop distances to reachable nodes.
inline std::vector<double> closeness_centrality(const Adjacency& adj) {
  const std::size_t n = adj.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    auto dist = bfs_distances(adj, int(v));
    long total = 0;
    long reached = 0;
    for (int d : dist) {
      if (d != kUnreachable) {
        total += d;
        ++reached;
      }
    }
    if (total > 0) out[v] = double(reached - 1) / double(total);
  }
  return out;
}

// Brandes' algorithm, normalized by the number of unordered pairs not
// containing the node: (n-1)(n-2)/2.
inline std::vector<double> betweenness_centrality(const Adjacency& adj) {
  const std::size_t n = adj.size();
  std::vector<double> cb(n, 0.0);
  std::vector<double> sigma(n), delta(n);
  std::vector<int> dist(n);
  std::vector<std::vector<int>> preds(n);
  for (std::size_t s = 0; s < n; ++s) {
    std::stack<int> order;
    for (std::size_t i = 0; i < n; ++i) {
      preds[i].clear();
      sigma[i] = 0.0;
      dist[i] = -1;
      delta[i] = 0.0;
    }
    sigma[s] = 1.0;
    dist[s] = 0;
    std::queue<int> q;
    q.push(int(s));
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      order.push(v);
      for (int w : adj[v]) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          q.push(w);
        }
        if (dist[w] == dist[v] + 1) {
          sigma[w] += sigma[v];
          preds[w].push_back(v);
        }
      }
    }
    while (!order.empty()) {
      int w = order.top();
      order.pop();
      for (int v : preds[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      if (w != int(s)) cb[w] += delta[w];
    }
  }
  // Each unordered pair was counted from both ends.
  for (double& c : cb) c /= 2.0;
  if (n > 2) {
    const double pairs = double(n - 1) * double(n - 2) / 2.0;
    for (double& c : cb) c /= pairs;
  }
  return cb;
}

// Principal eigenvector of the adjacency matrix, unit Euclidean norm.
// Iterates on (A + I) so bipartite graphs (paths, stars) converge.
inline std::vector<double> eigenvector_centrality(const Adjacency& adj,
                                                  double tolerance = 1e-13,
                                                  int max_iterations = 100000) {
  const std::size_t n = adj.size();
  if (n == 0) return {};
  std::vector<double> x(n, 1.0 / std::sqrt(double(n))), next(n);
  for (int it = 0; it < max_iterations; ++it) {
    for (std::size_t v = 0; v < n; ++v) {
      double s = x[v];
      for (int w : adj[v]) s += x[w];
      next[v] = s;
    }
    double norm = 0.0;
    for (double value : next) norm += value * value;
    norm = std::sqrt(norm);
    if (norm == 0.0) return std::vector<double>(n, 0.0);
    double change = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      next[v] /= norm;
      change += std::abs(next[v] - x[v]);
    }
    x.swap(next);
    if (change < tolerance * double(n)) break;
  }
  return x;
}

// Divide by the maximum entry; all-zero input stays zero.
inline std::vector<double> normalize_by_max(std::vector<double> values) {
  double mx = 0.0;
  for (double v : values) mx = std::max(mx, v);
  if (mx > 0.0)
    for (double& v : values) v /= mx;
  return values;
}

}  // namespace nfvra
