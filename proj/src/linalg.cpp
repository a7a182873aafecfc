#include "dlqg/linalg.hpp"

#include <Eigen/Eigenvalues>

namespace dlqg {

MatrixXd causal_mask(Eigen::Index rows, Eigen::Index cols, Eigen::Index row_block,
                     Eigen::Index col_block) {
  MatrixXd mask = MatrixXd::Zero(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (c / col_block <= r / row_block) mask(r, c) = 1.0;
    }
  }
  return mask;
}

bool is_block_causal(const MatrixXd& X, Eigen::Index row_block, Eigen::Index col_block) {
  for (Eigen::Index c = 0; c < X.cols(); ++c) {
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
      if (c / col_block > r / row_block && X(r, c) != 0.0) return false;
    }
  }
  return true;
}

MatrixXd nilpotent_inverse(const MatrixXd& X, int terms) {
  const MatrixXd I = MatrixXd::Identity(X.rows(), X.cols());
  // Horner: I + X(I + X(I + ...))
  MatrixXd S = I;
  for (int i = 0; i < terms; ++i) S = I + X * S;
  return S;
}

MatrixXd symmetric_sqrt(const MatrixXd& S) {
  if (S.size() == 0) return S;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(S));
  VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

double min_eigenvalue(const MatrixXd& S) {
  if (S.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(S), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace dlqg
