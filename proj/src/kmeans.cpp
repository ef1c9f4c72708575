#include "patmine/kmeans.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "patmine/error.hpp"
#include "patmine/io_util.hpp"
#include "patmine/rng.hpp"

namespace patmine {
namespace {

int nearest_centroid(const Matrix& centroids, const auto& point) {
  int best = 0;
  Real best_dist = std::numeric_limits<Real>::infinity();
  for (Index c = 0; c < centroids.rows(); ++c) {
    const Real dist = (centroids.row(c).transpose() - point).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best = static_cast<int>(c);
    }
  }
  return best;
}

// k-means++ seeding over the rows of `sample`.
Matrix kmeanspp_init(const Matrix& sample, int k, Rng& rng) {
  const Index n = sample.rows();
  Matrix centroids(k, sample.cols());
  centroids.row(0) =
      sample.row(static_cast<Index>(uniform_below(rng, static_cast<std::uint64_t>(n))));
  Vector dist2(n);
  for (Index i = 0; i < n; ++i) {
    dist2[i] = (sample.row(i) - centroids.row(0)).squaredNorm();
  }
  for (int c = 1; c < k; ++c) {
    const Real total = dist2.sum();
    Index chosen = 0;
    if (total > 0) {
      const Real r = uniform01(rng) * total;
      Real acc = 0;
      for (Index i = 0; i < n; ++i) {
        acc += dist2[i];
        if (acc >= r) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = static_cast<Index>(uniform_below(rng, static_cast<std::uint64_t>(n)));
    }
    centroids.row(c) = sample.row(chosen);
    for (Index i = 0; i < n; ++i) {
      dist2[i] = std::min(
          dist2[i], (sample.row(i) - centroids.row(c)).squaredNorm());
    }
  }
  return centroids;
}

}  // namespace

ClusterModel train_minibatch_kmeans(const Matrix& data, int k,
                                    const MiniBatchKMeansOptions& options,
                                    Transform transform) {
  const Index n = data.rows();
  if (n == 0) throw std::invalid_argument("empty point set");
  if (k < 1 || static_cast<Index>(k) > n) {
    throw std::invalid_argument("k must be in [1, number of points]");
  }
  Rng rng(options.seed);

  // Initialization from a seeded subsample of 10k points.
  const std::size_t init_size =
      std::min<std::size_t>(static_cast<std::size_t>(n),
                            static_cast<std::size_t>(10) * static_cast<std::size_t>(k));
  const auto init_idx =
      sample_indices(static_cast<std::size_t>(n), init_size, rng);
  Matrix init_sample(static_cast<Index>(init_idx.size()), data.cols());
  for (std::size_t i = 0; i < init_idx.size(); ++i) {
    init_sample.row(static_cast<Index>(i)) =
        data.row(static_cast<Index>(init_idx[i]));
  }
  ClusterModel model;
  model.k = k;
  model.transform = transform;
  model.seed = options.seed;
  model.centroids = kmeanspp_init(init_sample, k, rng);
  model.counts.assign(static_cast<std::size_t>(k), 0);

  const auto batch_size = static_cast<std::size_t>(
      std::min<Index>(n, std::max(1, options.batch_size)));
  std::vector<Index> batch(batch_size);
  std::vector<int> batch_assign(batch_size);

  for (int iter = 0; iter < options.max_iters; ++iter) {
    for (auto& b : batch) {
      b = static_cast<Index>(uniform_below(rng, static_cast<std::uint64_t>(n)));
    }
    const Matrix before = model.centroids;
    std::vector<long> batch_counts(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < batch_size; ++i) {
      batch_assign[i] =
          nearest_centroid(model.centroids, data.row(batch[i]).transpose());
    }
    for (std::size_t i = 0; i < batch_size; ++i) {
      const int c = batch_assign[i];
      ++model.counts[static_cast<std::size_t>(c)];
      ++batch_counts[static_cast<std::size_t>(c)];
      const Real eta =
          Real(1) / static_cast<Real>(model.counts[static_cast<std::size_t>(c)]);
      model.centroids.row(c) =
          (1 - eta) * model.centroids.row(c) + eta * data.row(batch[i]);
    }
    // Repair never-updated centroids: move to the farthest batch point of the
    // batch's largest cluster.
    for (int c = 0; c < k; ++c) {
      if (model.counts[static_cast<std::size_t>(c)] > 0) continue;
      int largest = 0;
      for (int j = 1; j < k; ++j) {
        if (batch_counts[static_cast<std::size_t>(j)] >
            batch_counts[static_cast<std::size_t>(largest)]) {
          largest = j;
        }
      }
      Real far_dist = -1;
      Index far_point = batch[0];
      for (std::size_t i = 0; i < batch_size; ++i) {
        if (batch_assign[i] != largest) continue;
        const Real dist = (data.row(batch[i]) -
                           model.centroids.row(largest)).squaredNorm();
        if (dist > far_dist) {
          far_dist = dist;
          far_point = batch[i];
        }
      }
      model.centroids.row(c) = data.row(far_point);
      model.counts[static_cast<std::size_t>(c)] = 1;
    }
    const Real displacement =
        (model.centroids - before).rowwise().norm().mean();
    if (displacement < options.tol) break;
  }
  return model;
}

int assign(const ClusterModel& model, const Vector& point) {
  if (point.size() != model.centroids.cols()) {
    throw std::invalid_argument("point dimension does not match centroids");
  }
  return nearest_centroid(model.centroids, point);
}

std::vector<int> assign_all(const ClusterModel& model, const Matrix& points) {
  if (points.cols() != model.centroids.cols()) {
    throw std::invalid_argument("point dimension does not match centroids");
  }
  std::vector<int> out(static_cast<std::size_t>(points.rows()));
  for (Index i = 0; i < points.rows(); ++i) {
    out[static_cast<std::size_t>(i)] =
        nearest_centroid(model.centroids, points.row(i).transpose());
  }
  return out;
}

Real inertia(const Matrix& points, const Matrix& centroids) {
  Real total = 0;
  for (Index i = 0; i < points.rows(); ++i) {
    Real best = std::numeric_limits<Real>::infinity();
    for (Index c = 0; c < centroids.rows(); ++c) {
      best = std::min(best, (points.row(i) - centroids.row(c)).squaredNorm());
    }
    total += best;
  }
  return total;
}

void ClusterModel::save_json(const std::string& path) const {
  nlohmann::json obj;
  obj["format"] = "patmine-kmeans-1";
  obj["k"] = k;
  obj["transform"] = to_string(transform);
  obj["seed"] = seed;
  obj["counts"] = counts;
  nlohmann::json rows = nlohmann::json::array();
  for (Index c = 0; c < centroids.rows(); ++c) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < centroids.cols(); ++j) row.push_back(centroids(c, j));
    rows.push_back(std::move(row));
  }
  obj["centroids"] = std::move(rows);
  write_text(path, obj.dump() + "\n");
}

ClusterModel ClusterModel::load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path);
  nlohmann::json obj = nlohmann::json::parse(in, nullptr, false);
  if (obj.is_discarded() || obj.value("format", "") != "patmine-kmeans-1") {
    throw DataError(path + ": not a cluster model file");
  }
  ClusterModel model;
  model.k = obj.at("k").get<int>();
  model.transform = transform_from_string(obj.at("transform").get<std::string>());
  model.seed = obj.at("seed").get<std::uint64_t>();
  model.counts = obj.at("counts").get<std::vector<long>>();
  const auto& rows = obj.at("centroids");
  if (rows.empty()) throw DataError(path + ": empty centroid matrix");
  model.centroids.resize(static_cast<Index>(rows.size()),
                         static_cast<Index>(rows.at(0).size()));
  for (Index c = 0; c < model.centroids.rows(); ++c) {
    const auto& row = rows.at(static_cast<std::size_t>(c));
    for (Index j = 0; j < model.centroids.cols(); ++j) {
      model.centroids(c, j) = row.at(static_cast<std::size_t>(j)).get<Real>();
    }
  }
  return model;
}

}  // namespace patmine
