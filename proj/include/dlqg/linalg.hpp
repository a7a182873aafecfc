#pragma once

#include <Eigen/Dense>

namespace dlqg {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Column-major vectorization, matching Eigen's storage order.
inline VectorXd vec(const MatrixXd& X) {
  return Eigen::Map<const VectorXd>(X.data(), X.size());
}

inline MatrixXd unvec(const VectorXd& v, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const MatrixXd>(v.data(), rows, cols);
}

// 1 in block (i, j) iff j <= i, for a matrix made of row_block x col_block blocks.
MatrixXd causal_mask(Eigen::Index rows, Eigen::Index cols, Eigen::Index row_block,
                     Eigen::Index col_block);

// True iff every entry strictly above the block diagonal is exactly zero.
bool is_block_causal(const MatrixXd& X, Eigen::Index row_block, Eigen::Index col_block);

// Sum_{i=0}^{terms} X^i, i.e. (I - X)^{-1} when X^{terms+1} = 0.
MatrixXd nilpotent_inverse(const MatrixXd& X, int terms);

// Symmetric square root via eigendecomposition; eigenvalues in [-tol, 0) are
// clamped to zero so singular covariances are accepted.
MatrixXd symmetric_sqrt(const MatrixXd& S);

double min_eigenvalue(const MatrixXd& S);

inline MatrixXd symmetrize(const MatrixXd& S) { return 0.5 * (S + S.transpose()); }

}  // namespace dlqg
