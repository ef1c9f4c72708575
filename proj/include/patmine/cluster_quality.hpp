#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "patmine/kmeans.hpp"
#include "patmine/types.hpp"

namespace patmine {

struct QualityReport {
  int k = 0;
  Real davies_bouldin = 0;
  Real silhouette_mean = 0;
  Real silhouette_std = 0;
  std::size_t sample_size = 10000;
  int replicates = 6;
};

enum class ClusterSelection { DaviesBouldin, Silhouette };

struct ClusterSweepOptions {
  MiniBatchKMeansOptions kmeans;
  std::size_t sample_size = 10000;
  int replicates = 6;
  ClusterSelection select_by = ClusterSelection::DaviesBouldin;
};

struct ClusterSweepResult {
  std::vector<QualityReport> reports;
  int selected_k = 0;
  ClusterModel best_model;
};

// DB = (1/k) sum_i max_{j != i} (S_i + S_j) / M_ij with S_i the mean member
// distance to centroid i and M_ij the centroid distance.  Clusters empty in
// the sample are excluded (counted in *excluded if given); fewer than two
// surviving clusters is an error.
Real davies_bouldin(const Matrix& points, const std::vector<int>& assignments,
                    const Matrix& centroids, int* excluded = nullptr);

// Mean/std over `replicates` seeded samples without replacement of the mean
// silhouette s(i) = (b - a) / max(a, b); singleton clusters score 0.
std::pair<Real, Real> silhouette_sampled(const Matrix& points,
                                         const std::vector<int>& assignments,
                                         std::size_t sample_size = 10000,
                                         int replicates = 6,
                                         std::uint64_t seed = 42);

// One model + QualityReport per k; selection is argmin DB by default
// (argmax silhouette via options.select_by).
ClusterSweepResult sweep_clusters(const Matrix& data,
                                  const std::vector<int>& k_grid,
                                  const ClusterSweepOptions& options,
                                  Transform transform = Transform::Identity);

}  // namespace patmine
