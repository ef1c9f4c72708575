#pragma once

// Independent brute-force references used to check the production
// implementations.  These deliberately share no code with the library paths
// they verify.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "patmine/types.hpp"

namespace patmine::testsupport {

// All paths through the label lattice, including START/STOP transitions.
inline void enumerate_paths(Index T, Index L, std::vector<int>& path,
                            const std::function<void(const std::vector<int>&)>& fn) {
  if (static_cast<Index>(path.size()) == T) {
    fn(path);
    return;
  }
  for (int y = 0; y < L; ++y) {
    path.push_back(y);
    enumerate_paths(T, L, path, fn);
    path.pop_back();
  }
}

inline Real enum_path_score(const Matrix& emissions, const Matrix& transitions,
                            const std::vector<int>& path) {
  const Index T = emissions.rows();
  const Index L = emissions.cols();
  Real score = transitions(L, path[0]) + emissions(0, path[0]);
  for (Index t = 1; t < T; ++t) {
    score += transitions(path[t - 1], path[t]) + emissions(t, path[t]);
  }
  return score + transitions(path[T - 1], L + 1);
}

inline Real enum_log_partition(const Matrix& emissions,
                               const Matrix& transitions) {
  std::vector<Real> scores;
  std::vector<int> path;
  enumerate_paths(emissions.rows(), emissions.cols(), path,
                  [&](const std::vector<int>& p) {
                    scores.push_back(enum_path_score(emissions, transitions, p));
                  });
  const Real m = *std::max_element(scores.begin(), scores.end());
  Real sum = 0;
  for (const Real s : scores) sum += std::exp(s - m);
  return m + std::log(sum);
}

inline std::pair<std::vector<int>, Real> enum_viterbi(
    const Matrix& emissions, const Matrix& transitions) {
  std::vector<int> best;
  Real best_score = -std::numeric_limits<Real>::infinity();
  std::vector<int> path;
  enumerate_paths(emissions.rows(), emissions.cols(), path,
                  [&](const std::vector<int>& p) {
                    const Real s = enum_path_score(emissions, transitions, p);
                    if (s > best_score) {
                      best_score = s;
                      best = p;
                    }
                  });
  return {best, best_score};
}

// Direct Davies-Bouldin with Euclidean scatter and separation.
inline Real brute_davies_bouldin(const Matrix& points,
                                 const std::vector<int>& assignments,
                                 const Matrix& centroids) {
  const int k = static_cast<int>(centroids.rows());
  std::vector<std::vector<Index>> members(static_cast<std::size_t>(k));
  for (Index i = 0; i < points.rows(); ++i) {
    members[static_cast<std::size_t>(assignments[static_cast<std::size_t>(i)])]
        .push_back(i);
  }
  std::vector<int> live;
  std::vector<Real> scatter(static_cast<std::size_t>(k), 0);
  for (int c = 0; c < k; ++c) {
    const auto& m = members[static_cast<std::size_t>(c)];
    if (m.empty()) continue;
    Real total = 0;
    for (const Index i : m) total += (points.row(i) - centroids.row(c)).norm();
    scatter[static_cast<std::size_t>(c)] = total / static_cast<Real>(m.size());
    live.push_back(c);
  }
  Real db = 0;
  for (const int i : live) {
    Real worst = 0;
    for (const int j : live) {
      if (i == j) continue;
      worst = std::max(worst,
                       (scatter[static_cast<std::size_t>(i)] +
                        scatter[static_cast<std::size_t>(j)]) /
                           (centroids.row(i) - centroids.row(j)).norm());
    }
    db += worst;
  }
  return db / static_cast<Real>(live.size());
}

// Direct O(n^2) silhouette over a full point set (no sampling).
inline Real brute_silhouette_mean(const Matrix& points,
                                  const std::vector<int>& assignments) {
  const Index n = points.rows();
  int k = 0;
  for (const int a : assignments) k = std::max(k, a + 1);
  std::vector<long> sizes(static_cast<std::size_t>(k), 0);
  for (const int a : assignments) ++sizes[static_cast<std::size_t>(a)];

  Real total = 0;
  for (Index i = 0; i < n; ++i) {
    const int own = assignments[static_cast<std::size_t>(i)];
    if (sizes[static_cast<std::size_t>(own)] <= 1) continue;
    std::vector<Real> sums(static_cast<std::size_t>(k), 0);
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      sums[static_cast<std::size_t>(assignments[static_cast<std::size_t>(j)])] +=
          (points.row(i) - points.row(j)).norm();
    }
    const Real a = sums[static_cast<std::size_t>(own)] /
                   static_cast<Real>(sizes[static_cast<std::size_t>(own)] - 1);
    Real b = std::numeric_limits<Real>::infinity();
    for (int c = 0; c < k; ++c) {
      if (c == own || sizes[static_cast<std::size_t>(c)] == 0) continue;
      b = std::min(b, sums[static_cast<std::size_t>(c)] /
                          static_cast<Real>(sizes[static_cast<std::size_t>(c)]));
    }
    total += (b - a) / std::max(a, b);
  }
  return total / static_cast<Real>(n);
}

}  // namespace patmine::testsupport
