#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "nfvra/embedding.hpp"

namespace nfvra {

// Outcome of one request in an online run.
struct RequestRow {
  int id = 0;
  double arrival = 0.0;
  double lifetime = 0.0;
  std::size_t size = 0;
  int phase = 0;
  bool accepted = false;
  double revenue = 0.0;
  double cost = 0.0;
  double r2c = 0.0;
  double solve_seconds = 0.0;
  std::optional<FailureReason> failure_reason;
};

struct MetricsSummary {
  double rac = 0.0;  // percent
  double lrc = 0.0;  // fraction
  double lar = 0.0;
  double ast = 0.0;  // seconds
  double horizon = 0.0;
  double total_revenue = 0.0;
  std::size_t requests = 0;
  std::size_t accepted = 0;
  bool lrc_undefined = false;  // no accepted request
};

// Last event time: departure for accepted requests, arrival otherwise.
inline double horizon_of(const std::vector<RequestRow>& rows) {
  double t = 0.0;
  for (const auto& r : rows) t = std::max(t, r.accepted ? r.arrival + r.lifetime : r.arrival);
  return t;
}

// RAC = 100·accepted/total; LRC = Σ REV·ϖ / Σ COST·ϖ over accepted rows;
// LAR = Σ REV·ϖ / T; AST = mean solve time. Empty runs report zeros.
inline MetricsSummary compute_metrics(const std::vector<RequestRow>& rows,
                                      std::optional<double> horizon = std::nullopt) {
  MetricsSummary m;
  m.requests = rows.size();
  m.horizon = horizon.value_or(horizon_of(rows));
  double rev_time = 0.0, cost_time = 0.0, solve = 0.0;
  for (const auto& r : rows) {
    solve += r.solve_seconds;
    if (!r.accepted) continue;
    ++m.accepted;
    rev_time += r.revenue * r.lifetime;
    cost_time += r.cost * r.lifetime;
    m.total_revenue += r.revenue;
  }
  if (m.requests > 0) {
    m.rac = 100.0 * double(m.accepted) / double(m.requests);
    m.ast = solve / double(m.requests);
  }
  m.lrc_undefined = m.accepted == 0 || cost_time <= 0.0;
  m.lrc = m.lrc_undefined ? 0.0 : rev_time / cost_time;
  m.lar = m.horizon > 0.0 ? rev_time / m.horizon : 0.0;
  return m;
}

inline double mean(const std::vector<double>& xs) {
  return xs.empty() ? 0.0 : std::accumulate(xs.begin(), xs.end(), 0.0) / double(xs.size());
}

inline double stddev(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double mu = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - mu) * (x - mu);
  return std::sqrt(s / double(xs.size() - 1));
}

// Ranks with ties sharing their average rank (1-based).
inline std::vector<double> average_ranks(const std::vector<double>& xs) {
  std::vector<std::size_t> idx(xs.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return xs[a] < xs[b]; });
  std::vector<double> rank(xs.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && xs[idx[j + 1]] == xs[idx[i]]) ++j;
    const double r = (double(i) + double(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = r;
    i = j + 1;
  }
  return rank;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson(average_ranks(x), average_ranks(y));
}

}  // namespace nfvra
