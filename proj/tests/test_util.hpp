#ifndef BLOCKSEL_TEST_UTIL_HPP
#define BLOCKSEL_TEST_UTIL_HPP

#include <Eigen/Dense>

#include <vector>

#include "blocksel/rng.hpp"
#include "blocksel/types.hpp"

namespace testutil {

inline Eigen::MatrixXd gaussian_matrix(long n, long p, blocksel::Rng& rng) {
  Eigen::MatrixXd X(n, p);
  for (long i = 0; i < n; ++i)
    for (long k = 0; k < p; ++k) X(i, k) = rng.normal();
  return X;
}

inline Eigen::VectorXd gaussian_vector(long n, blocksel::Rng& rng) {
  Eigen::VectorXd v(n);
  for (long i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

// Independent projection oracle: dense P_M = X_M (X_M'X_M)^{-1} X_M'.
inline Eigen::MatrixXd projection_matrix(const Eigen::MatrixXd& X,
                                         const std::vector<int>& idx) {
  if (idx.empty()) return Eigen::MatrixXd::Zero(X.rows(), X.rows());
  Eigen::MatrixXd Xm(X.rows(), idx.size());
  for (std::size_t c = 0; c < idx.size(); ++c) Xm.col(c) = X.col(idx[c]);
  Eigen::MatrixXd G = Xm.transpose() * Xm;
  return Xm * G.inverse() * Xm.transpose();
}

}  // namespace testutil

#endif
