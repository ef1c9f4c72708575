#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "patmine/math.hpp"
#include "patmine/types.hpp"

// Linear-chain CRF over T x L emission scores with an (L+2) x (L+2)
// transition matrix; the two extra states are START (= L) and STOP (= L+1)
// and are never emitted.

namespace patmine {

template <class DerivedE>
void crf_check_emissions(const Eigen::MatrixBase<DerivedE>& emissions) {
  if (emissions.rows() < 1 || emissions.cols() < 1) {
    throw std::invalid_argument("emissions must be at least 1 x 1");
  }
  if (!emissions.allFinite()) {
    throw std::invalid_argument("non-finite emissions");
  }
}

template <class DerivedE, class DerivedT>
MatrixX<typename DerivedE::Scalar> crf_forward_lattice(
    const Eigen::MatrixBase<DerivedE>& emissions,
    const Eigen::MatrixBase<DerivedT>& transitions) {
  using Scalar = typename DerivedE::Scalar;
  const Index T = emissions.rows();
  const Index L = emissions.cols();
  const Index start = L;
  MatrixX<Scalar> alpha(T, L);
  alpha.row(0) = transitions.row(start).head(L) + emissions.row(0);
  VectorX<Scalar> work(L);
  for (Index t = 1; t < T; ++t) {
    for (Index y = 0; y < L; ++y) {
      work = alpha.row(t - 1).transpose() + transitions.col(y).head(L);
      alpha(t, y) = log_sum_exp(work) + emissions(t, y);
    }
  }
  return alpha;
}

template <class DerivedE, class DerivedT>
typename DerivedE::Scalar crf_forward_log_partition(
    const Eigen::MatrixBase<DerivedE>& emissions,
    const Eigen::MatrixBase<DerivedT>& transitions) {
  using Scalar = typename DerivedE::Scalar;
  crf_check_emissions(emissions);
  const Index L = emissions.cols();
  const MatrixX<Scalar> alpha = crf_forward_lattice(emissions, transitions);
  const VectorX<Scalar> last =
      alpha.row(emissions.rows() - 1).transpose() +
      transitions.col(L + 1).head(L);
  return log_sum_exp(last);
}

template <class DerivedE, class DerivedT>
typename DerivedE::Scalar crf_path_score(
    const Eigen::MatrixBase<DerivedE>& emissions,
    const Eigen::MatrixBase<DerivedT>& transitions,
    const std::vector<int>& path) {
  using Scalar = typename DerivedE::Scalar;
  const Index T = emissions.rows();
  const Index L = emissions.cols();
  if (static_cast<Index>(path.size()) != T) {
    throw std::invalid_argument("path length does not match emissions");
  }
  Scalar score = transitions(L, path[0]) + emissions(0, path[0]);
  for (Index t = 1; t < T; ++t) {
    score += transitions(path[t - 1], path[t]) + emissions(t, path[t]);
  }
  score += transitions(path[T - 1], L + 1);
  return score;
}

template <class DerivedE, class DerivedT>
typename DerivedE::Scalar crf_neg_log_likelihood(
    const Eigen::MatrixBase<DerivedE>& emissions,
    const Eigen::MatrixBase<DerivedT>& transitions,
    const std::vector<int>& gold) {
  crf_check_emissions(emissions);
  return crf_forward_log_partition(emissions, transitions) -
         crf_path_score(emissions, transitions, gold);
}

// NLL plus analytic gradients: d(emissions) = marginals - onehot(gold) and
// d(transitions) = expected transition counts - gold counts, computed by
// forward-backward.  Gradient buffers are overwritten.
template <class Scalar>
Scalar crf_nll_with_gradients(const MatrixX<Scalar>& emissions,
                              const MatrixX<Scalar>& transitions,
                              const std::vector<int>& gold,
                              MatrixX<Scalar>& grad_emissions,
                              MatrixX<Scalar>& grad_transitions) {
  crf_check_emissions(emissions);
  const Index T = emissions.rows();
  const Index L = emissions.cols();
  const Index start = L, stop = L + 1;

  const MatrixX<Scalar> alpha = crf_forward_lattice(emissions, transitions);
  MatrixX<Scalar> beta(T, L);
  beta.row(T - 1) = transitions.col(stop).head(L).transpose();
  VectorX<Scalar> work(L);
  for (Index t = T - 2; t >= 0; --t) {
    for (Index y = 0; y < L; ++y) {
      work = transitions.row(y).head(L).transpose() +
             emissions.row(t + 1).transpose() + beta.row(t + 1).transpose();
      beta(t, y) = log_sum_exp(work);
    }
  }
  const VectorX<Scalar> last =
      alpha.row(T - 1).transpose() + transitions.col(stop).head(L);
  const Scalar log_z = log_sum_exp(last);

  grad_emissions.resize(T, L);
  grad_transitions = MatrixX<Scalar>::Zero(L + 2, L + 2);

  for (Index t = 0; t < T; ++t) {
    grad_emissions.row(t) =
        (alpha.row(t) + beta.row(t)).array() - log_z;
    grad_emissions.row(t) = grad_emissions.row(t).array().exp();
  }
  // Boundary transitions share the unary marginals.
  grad_transitions.row(start).head(L) = grad_emissions.row(0);
  grad_transitions.col(stop).head(L) = grad_emissions.row(T - 1).transpose();
  for (Index t = 0; t + 1 < T; ++t) {
    for (Index i = 0; i < L; ++i) {
      for (Index j = 0; j < L; ++j) {
        const Scalar log_xi = alpha(t, i) + transitions(i, j) +
                              emissions(t + 1, j) + beta(t + 1, j) - log_z;
        grad_transitions(i, j) += std::exp(log_xi);
      }
    }
  }

  grad_emissions(0, gold[0]) -= 1;
  grad_transitions(start, gold[0]) -= 1;
  for (Index t = 1; t < T; ++t) {
    grad_emissions(t, gold[t]) -= 1;
    grad_transitions(gold[t - 1], gold[t]) -= 1;
  }
  grad_transitions(gold[T - 1], stop) -= 1;

  return log_z - crf_path_score(emissions, transitions, gold);
}

// Max-product decoding with backpointers; score ties resolve to the lower
// label index at every step.
template <class DerivedE, class DerivedT>
std::pair<std::vector<int>, typename DerivedE::Scalar> crf_viterbi(
    const Eigen::MatrixBase<DerivedE>& emissions,
    const Eigen::MatrixBase<DerivedT>& transitions) {
  using Scalar = typename DerivedE::Scalar;
  crf_check_emissions(emissions);
  const Index T = emissions.rows();
  const Index L = emissions.cols();
  const Index start = L, stop = L + 1;

  MatrixX<Scalar> delta(T, L);
  Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic> back(T, L);
  delta.row(0) = transitions.row(start).head(L) + emissions.row(0);
  for (Index t = 1; t < T; ++t) {
    for (Index y = 0; y < L; ++y) {
      int arg = 0;
      Scalar best = delta(t - 1, 0) + transitions(0, y);
      for (Index p = 1; p < L; ++p) {
        const Scalar cand = delta(t - 1, p) + transitions(p, y);
        if (cand > best) {
          best = cand;
          arg = static_cast<int>(p);
        }
      }
      delta(t, y) = best + emissions(t, y);
      back(t, y) = arg;
    }
  }
  int last = 0;
  Scalar best = delta(T - 1, 0) + transitions(0, stop);
  for (Index y = 1; y < L; ++y) {
    const Scalar cand = delta(T - 1, y) + transitions(y, stop);
    if (cand > best) {
      best = cand;
      last = static_cast<int>(y);
    }
  }
  std::vector<int> path(static_cast<std::size_t>(T));
  path[static_cast<std::size_t>(T - 1)] = last;
  for (Index t = T - 1; t > 0; --t) {
    last = back(t, last);
    path[static_cast<std::size_t>(t - 1)] = last;
  }
  return {std::move(path), best};
}

}  // namespace patmine
