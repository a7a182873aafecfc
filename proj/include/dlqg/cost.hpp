#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "dlqg/model.hpp"

namespace dlqg {

// Expected closed-loop cost J(K) as a sum of six squared norms, with the
// loop inverses evaluated as finite Neumann sums. Throws NonCausalController.
double cost_k(const CompactSystem& cs, const MatrixXd& K);

// Youla-domain cost J~(Q), evaluated term by term. Throws NonCausalController.
double cost_q(const CompactSystem& cs, const MatrixXd& Q);

// h(Q) = (I + Q G)^{-1} Q and its inverse h^{-1}(K) = (I - K G)^{-1} K.
MatrixXd h_map(const MatrixXd& Q, const MatrixXd& G, int horizon);
MatrixXd h_inv(const MatrixXd& K, const MatrixXd& G, int horizon);

// J~(Q) = 1/2 q^T H q + g^T q + c over the causal coordinates q of vec(Q).
struct QuadraticForm {
  MatrixXd H;                        // r_causal x r_causal, symmetric positive definite
  VectorXd g;                        // r_causal
  double c = 0.0;
  std::vector<Eigen::Index> coords;  // vec(Q) index of each causal coordinate
  Eigen::Index rows = 0, cols = 0;   // shape of Q

  double value(const VectorXd& q) const { return 0.5 * q.dot(H * q) + g.dot(q) + c; }
  VectorXd restrict(const MatrixXd& Q) const;
  MatrixXd expand(const VectorXd& q) const;
};

QuadraticForm quadratic_form(const CompactSystem& cs);

// Gradient of J~, masked to the causal entries.
MatrixXd grad_q(const CompactSystem& cs, const MatrixXd& Q);

// Gradient of J, masked to the causal entries. Throws NonCausalController.
MatrixXd grad_k(const CompactSystem& cs, const MatrixXd& K);

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long samples = 0;
};

// Sample-average of x^T M x + u^T R u under w ~ N(mu_w, Sigma_w), v ~ N(0, Sigma_v).
// Samples are split into fixed chunks with per-chunk random streams, so the
// result does not depend on `jobs`.
MonteCarloEstimate monte_carlo_cost(const CompactSystem& cs, const MatrixXd& K, long samples,
                                    std::uint64_t seed, int jobs = 1);

}  // namespace dlqg
