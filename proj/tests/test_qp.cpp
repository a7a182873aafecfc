#include <gtest/gtest.h>

#include <random>

#include "dlqg/cost.hpp"
#include "dlqg/errors.hpp"
#include "dlqg/linalg.hpp"
#include "dlqg/qp.hpp"
#include "support.hpp"

namespace dlqg {
namespace {

using testing::random_causal;

TEST(Reduce, FullCausalBasisReproducesForm) {
  std::mt19937_64 rng(81);
  const auto d = testing::random_dims(rng);
  const CompactSystem cs = assemble_compact(testing::random_system(rng, d));
  const QuadraticForm qf = quadratic_form(cs);
  const SubspaceSpec spec =
      sparsity_subspace(SparsityPattern::make(causal_pattern(d.m, d.p, d.N), d.m, d.p, d.N));
  const ReducedQuadratic rq = reduce_quadratic(qf, spec);
  EXPECT_LT((rq.Hr - qf.H).norm(), 1e-10 * qf.H.norm());
  EXPECT_LT((rq.gr - qf.g).norm(), 1e-10 * (1 + qf.g.norm()));
}

TEST(Reduce, ValueMatchesCostOnSubspace) {
  std::mt19937_64 rng(82);
  const CompactSystem cs = assemble_compact(testing::example2_system());
  const SubspaceSpec spec = static_diag_subspace(2, 2, 2);
  const ReducedQuadratic rq = reduce_quadratic(quadratic_form(cs), spec);
  for (int k = 0; k < 5; ++k) {
    const VectorXd alpha = testing::random_matrix(rng, 2, 1);
    const double expected = cost_q(cs, from_coordinates(alpha, spec));
    EXPECT_NEAR(rq.value(alpha), expected, 1e-10 * expected);
  }
}

TEST(Reduce, EmptySubspace) {
  const CompactSystem cs = assemble_compact(testing::example2_system());
  const SubspaceSpec spec = sparsity_subspace(SparsityPattern::make(BinaryMatrix::Zero(4, 4), 2, 2, 2));
  const ReducedQuadratic rq = reduce_quadratic(quadratic_form(cs), spec);
  EXPECT_EQ(rq.Hr.size(), 0);
  const QDomainSolution sol = solve_q_domain(cs, spec);
  EXPECT_TRUE(sol.Q.isZero());
  EXPECT_NEAR(sol.J, cs.open_loop_cost, 1e-12);
}

TEST(Solve, FiveStateOptimum) {
  const CompactSystem cs = assemble_compact(testing::example1_system());
  const SubspaceSpec spec = sparsity_subspace(testing::example1_pattern());
  const QDomainSolution sol = solve_q_domain(cs, spec);
  EXPECT_NEAR(sol.J, 796.5627, 1e-3);
  EXPECT_NEAR(cost_q(cs, sol.Q), sol.J, 1e-9 * sol.J);
  EXPECT_LT((project(sol.Q, spec) - sol.Q).norm(), 1e-14);
}

TEST(Solve, ZeroStateWeightGivesZeroParameter) {
  const MatrixXd I = MatrixXd::Identity(2, 2);
  const MatrixXd Z = MatrixXd::Zero(2, 2);
  MatrixXd A(2, 2);
  A << 1, 2, -1, -3;
  const CompactSystem cs =
      assemble_compact(testing::time_invariant(2, A, I, I, Z, I, I, I, I, VectorXd::Ones(2)));
  const QDomainSolution sol =
      solve_q_domain(cs, sparsity_subspace(SparsityPattern::make(causal_pattern(2, 2, 2), 2, 2, 2)));
  EXPECT_LT(sol.Q.norm(), 1e-12);
  EXPECT_NEAR(sol.J, 0.0, 1e-12);
}

TEST(Solve, FirstOrderOptimalityAndUniqueness) {
  std::mt19937_64 rng(83);
  for (int trial = 0; trial < 10; ++trial) {
    const auto d = testing::random_dims(rng);
    const CompactSystem cs = assemble_compact(testing::random_system(rng, d));
    const SparsityPattern P = SparsityPattern::make(
        testing::random_causal_pattern(rng, d.m, d.p, d.N, 0.6), d.m, d.p, d.N);
    const SubspaceSpec spec = sparsity_subspace(P);
    const QDomainSolution sol = solve_q_domain(cs, spec);
    const MatrixXd g = project(grad_q(cs, sol.Q), spec);
    EXPECT_LT(g.cwiseAbs().maxCoeff(), 1e-8 * (1 + sol.J));
    for (int k = 0; k < 3; ++k) {
      const MatrixXd D = project(testing::random_matrix(rng, spec.rows(), spec.cols(), 0.1), spec);
      if (D.isZero()) continue;
      EXPECT_GT(cost_q(cs, sol.Q + D), sol.J);
    }
  }
}

TEST(Recover, QiPatternStaysInSubspace) {
  const CompactSystem cs = assemble_compact(testing::example1_system());
  const SubspaceSpec spec = sparsity_subspace(testing::example1_pattern());
  const QDomainSolution sol = solve_q_domain(cs, spec);
  const RecoveredController rc = recover_controller(sol.Q, cs, spec, true);
  EXPECT_LT(rc.off_subspace_residual, kRecoveryTol);
  EXPECT_NEAR(cost_k(cs, rc.K), sol.J, 1e-8 * sol.J);
  EXPECT_LT((h_inv(rc.K, cs.G, 3) - sol.Q).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Recover, StaticDiagonalEscapes) {
  const CompactSystem cs = assemble_compact(testing::example2_system());
  const SubspaceSpec spec = static_diag_subspace(2, 2, 2);
  const QDomainSolution sol = solve_q_domain(cs, spec);
  const RecoveredController rc = recover_controller(sol.Q, cs, spec, false);
  EXPECT_GT(rc.off_subspace_residual, 1e-3);
  EXPECT_THROW(recover_controller(sol.Q, cs, spec, true), SubspaceEscape);
}

}  // namespace
}  // namespace dlqg
