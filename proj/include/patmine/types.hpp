#pragma once

#include <Eigen/Dense>

namespace patmine {

template <class Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <class Scalar>
using RowVectorX = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;
template <class Scalar>
using ArrayXX = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using ArrayX = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

using Real = double;
using Matrix = MatrixX<Real>;
using Vector = VectorX<Real>;
using RowVector = RowVectorX<Real>;
using Array = ArrayX<Real>;
using Index = Eigen::Index;

}  // namespace patmine
