#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "patmine/types.hpp"

namespace patmine {

// Geometry adapters for Euclidean k-Means on probability vectors:
// L2Normalize makes squared Euclidean distance twice the cosine distance;
// ElementwiseSqrt (x -> sqrt(x/2)) makes it the squared Hellinger distance.
enum class Transform { Identity, L2Normalize, ElementwiseSqrt };

std::string to_string(Transform t);
Transform transform_from_string(const std::string& name);

template <class Derived>
VectorX<typename Derived::Scalar> apply_transform(
    const Eigen::MatrixBase<Derived>& theta, Transform t) {
  using Scalar = typename Derived::Scalar;
  switch (t) {
    case Transform::Identity:
      return theta;
    case Transform::L2Normalize: {
      const Scalar norm = theta.norm();
      if (norm <= Scalar(0)) {
        throw std::invalid_argument("cannot L2-normalize a zero vector");
      }
      return theta / norm;
    }
    case Transform::ElementwiseSqrt:
      return (theta.array() / Scalar(2)).sqrt().matrix();
  }
  throw std::invalid_argument("unknown transform");
}

template <class DerivedA, class DerivedB>
typename DerivedA::Scalar squared_euclidean(
    const Eigen::MatrixBase<DerivedA>& x,
    const Eigen::MatrixBase<DerivedB>& y) {
  return (x - y).squaredNorm();
}

template <class DerivedA, class DerivedB>
typename DerivedA::Scalar cosine_distance(
    const Eigen::MatrixBase<DerivedA>& x,
    const Eigen::MatrixBase<DerivedB>& y) {
  using Scalar = typename DerivedA::Scalar;
  return Scalar(1) - x.dot(y) / (x.norm() * y.norm());
}

template <class DerivedA, class DerivedB>
typename DerivedA::Scalar hellinger_distance(
    const Eigen::MatrixBase<DerivedA>& p,
    const Eigen::MatrixBase<DerivedB>& q) {
  return std::sqrt(((p.array() / 2).sqrt() - (q.array() / 2).sqrt())
                       .square()
                       .sum());
}

}  // namespace patmine
