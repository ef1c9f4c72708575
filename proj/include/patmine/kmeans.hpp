#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "patmine/transforms.hpp"
#include "patmine/types.hpp"

namespace patmine {

struct MiniBatchKMeansOptions {
  int batch_size = 4096;
  int max_iters = 100;       // mini-batch iterations
  Real tol = 1e-4;           // mean centroid displacement
  std::uint64_t seed = 42;
};

struct ClusterModel {
  int k = 0;
  Matrix centroids;               // k x dim
  Transform transform = Transform::Identity;
  std::vector<long> counts;       // lifetime per-centroid assignment counts
  std::uint64_t seed = 0;

  void save_json(const std::string& path) const;
  static ClusterModel load_json(const std::string& path);
};

// Sculley-style mini-batch k-Means: k-means++ initialization on a seeded
// subsample of 10k points, then per batch a nearest-centroid assignment and
// a per-centroid gradient step with learning rate 1/count.  Deterministic
// given the seed.  `data` must already carry the chosen transform.
ClusterModel train_minibatch_kmeans(const Matrix& data, int k,
                                    const MiniBatchKMeansOptions& options,
                                    Transform transform = Transform::Identity);

// Nearest centroid under squared Euclidean distance; ties take the lowest id.
int assign(const ClusterModel& model, const Vector& point);

std::vector<int> assign_all(const ClusterModel& model, const Matrix& points);

Real inertia(const Matrix& points, const Matrix& centroids);

}  // namespace patmine
