#pragma once

#include <Eigen/Dense>

#include "dlqg/cost.hpp"
#include "dlqg/model.hpp"
#include "dlqg/subspace.hpp"

namespace dlqg {

// J~ restricted to the subspace: J~(unvec(B alpha)) = 1/2 a^T Hr a + gr^T a + c.
struct ReducedQuadratic {
  MatrixXd Hr;
  VectorXd gr;
  double c = 0.0;

  double value(const VectorXd& alpha) const {
    return 0.5 * alpha.dot(Hr * alpha) + gr.dot(alpha) + c;
  }
};

// Throws NonCausalPattern if a basis column has support outside the causal cone.
ReducedQuadratic reduce_quadratic(const QuadraticForm& qf, const SubspaceSpec& spec);

// Minimizer of J~ over the subspace. This is the optimum of the original
// problem only when the subspace is QI; otherwise it is just the Q-domain
// optimum and h(Q*) generally leaves the subspace.
struct QDomainSolution {
  MatrixXd Q;
  double J = 0.0;
  VectorXd alpha;
};

// Throws NumericallyIndefinite if the Cholesky factorization fails.
QDomainSolution solve_q_domain(const CompactSystem& cs, const SubspaceSpec& spec);

struct RecoveredController {
  MatrixXd K;
  double off_subspace_residual = 0.0;  // max-abs of K - project(K)
};

inline constexpr double kRecoveryTol = 1e-8;

// K* = h(Q*). With qi_claimed, throws SubspaceEscape if K* leaves the subspace
// by more than kRecoveryTol.
RecoveredController recover_controller(const MatrixXd& Q, const CompactSystem& cs,
                                       const SubspaceSpec& spec, bool qi_claimed);

}  // namespace dlqg
