#include "patmine/cluster_quality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "patmine/rng.hpp"

namespace patmine {

Real davies_bouldin(const Matrix& points, const std::vector<int>& assignments,
                    const Matrix& centroids, int* excluded) {
  if (points.rows() != static_cast<Index>(assignments.size())) {
    throw std::invalid_argument("assignments do not match points");
  }
  const int k = static_cast<int>(centroids.rows());
  std::vector<long> sizes(static_cast<std::size_t>(k), 0);
  std::vector<Real> scatter(static_cast<std::size_t>(k), 0);
  for (Index i = 0; i < points.rows(); ++i) {
    const int c = assignments[static_cast<std::size_t>(i)];
    if (c < 0 || c >= k) throw std::invalid_argument("assignment out of range");
    ++sizes[static_cast<std::size_t>(c)];
    scatter[static_cast<std::size_t>(c)] +=
        (points.row(i) - centroids.row(c)).norm();
  }
  std::vector<int> live;
  for (int c = 0; c < k; ++c) {
    if (sizes[static_cast<std::size_t>(c)] > 0) {
      scatter[static_cast<std::size_t>(c)] /=
          static_cast<Real>(sizes[static_cast<std::size_t>(c)]);
      live.push_back(c);
    }
  }
  if (excluded != nullptr) *excluded = k - static_cast<int>(live.size());
  if (live.size() < 2) {
    throw std::invalid_argument(
        "Davies-Bouldin needs at least two non-empty clusters");
  }
  Real total = 0;
  for (const int i : live) {
    Real worst = 0;
    for (const int j : live) {
      if (j == i) continue;
      const Real separation = (centroids.row(i) - centroids.row(j)).norm();
      worst = std::max(worst, (scatter[static_cast<std::size_t>(i)] +
                               scatter[static_cast<std::size_t>(j)]) /
                                  separation);
    }
    total += worst;
  }
  return total / static_cast<Real>(live.size());
}

namespace {

Real mean_silhouette(const Matrix& points, const std::vector<int>& assignments,
                     const std::vector<std::size_t>& sample) {
  int max_cluster = 0;
  for (const std::size_t i : sample) {
    max_cluster = std::max(max_cluster, assignments[i]);
  }
  std::vector<long> sizes(static_cast<std::size_t>(max_cluster) + 1, 0);
  for (const std::size_t i : sample) ++sizes[static_cast<std::size_t>(assignments[i])];
  int present = 0;
  for (const long s : sizes) present += s > 0 ? 1 : 0;
  if (present < 2) {
    throw std::invalid_argument("silhouette needs two clusters in the sample");
  }

  Real total = 0;
  std::vector<Real> dist_sum(sizes.size());
  for (const std::size_t i : sample) {
    const int own = assignments[i];
    if (sizes[static_cast<std::size_t>(own)] <= 1) continue;  // singleton: s = 0
    std::fill(dist_sum.begin(), dist_sum.end(), Real(0));
    for (const std::size_t j : sample) {
      if (j == i) continue;
      dist_sum[static_cast<std::size_t>(assignments[j])] +=
          (points.row(static_cast<Index>(i)) - points.row(static_cast<Index>(j)))
              .norm();
    }
    const Real a = dist_sum[static_cast<std::size_t>(own)] /
                   static_cast<Real>(sizes[static_cast<std::size_t>(own)] - 1);
    Real b = std::numeric_limits<Real>::infinity();
    for (std::size_t c = 0; c < sizes.size(); ++c) {
      if (static_cast<int>(c) == own || sizes[c] == 0) continue;
      b = std::min(b, dist_sum[c] / static_cast<Real>(sizes[c]));
    }
    const Real denom = std::max(a, b);
    total += denom > 0 ? (b - a) / denom : Real(0);
  }
  return total / static_cast<Real>(sample.size());
}

}  // namespace

std::pair<Real, Real> silhouette_sampled(const Matrix& points,
                                         const std::vector<int>& assignments,
                                         std::size_t sample_size,
                                         int replicates, std::uint64_t seed) {
  if (points.rows() != static_cast<Index>(assignments.size())) {
    throw std::invalid_argument("assignments do not match points");
  }
  if (replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  const auto n = static_cast<std::size_t>(points.rows());
  Rng rng(seed);
  std::vector<Real> means;
  means.reserve(static_cast<std::size_t>(replicates));
  for (int r = 0; r < replicates; ++r) {
    const auto sample = sample_indices(n, std::min(sample_size, n), rng);
    means.push_back(mean_silhouette(points, assignments, sample));
  }
  Real mean = 0;
  for (const Real m : means) mean += m;
  mean /= static_cast<Real>(means.size());
  Real var = 0;
  for (const Real m : means) var += (m - mean) * (m - mean);
  const Real std_dev =
      means.size() > 1 ? std::sqrt(var / static_cast<Real>(means.size() - 1))
                       : Real(0);
  return {mean, std_dev};
}

ClusterSweepResult sweep_clusters(const Matrix& data,
                                  const std::vector<int>& k_grid,
                                  const ClusterSweepOptions& options,
                                  Transform transform) {
  if (k_grid.empty()) throw std::invalid_argument("empty cluster grid");
  ClusterSweepResult result;
  Real best_score = std::numeric_limits<Real>::infinity();
  for (const int k : k_grid) {
    ClusterModel model = train_minibatch_kmeans(data, k, options.kmeans,
                                                transform);
    const std::vector<int> assignments = assign_all(model, data);
    QualityReport report;
    report.k = k;
    report.sample_size = options.sample_size;
    report.replicates = options.replicates;
    report.davies_bouldin =
        davies_bouldin(data, assignments, model.centroids);
    std::tie(report.silhouette_mean, report.silhouette_std) =
        silhouette_sampled(data, assignments, options.sample_size,
                           options.replicates, options.kmeans.seed);
    result.reports.push_back(report);
    const Real score = options.select_by == ClusterSelection::DaviesBouldin
                           ? report.davies_bouldin
                           : -report.silhouette_mean;
    if (score < best_score) {
      best_score = score;
      result.selected_k = k;
      result.best_model = std::move(model);
    }
  }
  return result;
}

}  // namespace patmine
