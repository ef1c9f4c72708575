#pragma once

#include <cmath>
#include <limits>

#include "patmine/types.hpp"

namespace patmine {

// Digamma via upward recurrence into the asymptotic region (x >= 6),
// then the standard series.  Accurate to ~1e-12 for x > 0.
template <class Scalar>
Scalar digamma(Scalar x) {
  Scalar result = 0;
  while (x < Scalar(6)) {
    result -= Scalar(1) / x;
    x += Scalar(1);
  }
  const Scalar r = Scalar(1) / x;
  const Scalar r2 = r * r;
  result += std::log(x) - Scalar(0.5) * r;
  result -= r2 * (Scalar(1.0 / 12) -
                  r2 * (Scalar(1.0 / 120) -
                        r2 * (Scalar(1.0 / 252) - r2 * Scalar(1.0 / 240))));
  return result;
}

template <class Derived>
typename Derived::Scalar log_sum_exp(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  const Scalar m = v.maxCoeff();
  if (!std::isfinite(m)) return m;  // all -inf (or a nan propagates)
  return m + std::log((v.array() - m).exp().sum());
}

// Elementwise psi(v_i) - psi(sum(v)); the Dirichlet expectation of log x.
template <class Derived>
VectorX<typename Derived::Scalar> dirichlet_expect_log(
    const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  const Scalar total = digamma(Scalar(v.sum()));
  VectorX<Scalar> out(v.size());
  for (Index i = 0; i < v.size(); ++i) out[i] = digamma(Scalar(v[i])) - total;
  return out;
}

}  // namespace patmine
