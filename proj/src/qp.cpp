#include "dlqg/qp.hpp"

#include <Eigen/Cholesky>

#include "dlqg/errors.hpp"

namespace dlqg {

ReducedQuadratic reduce_quadratic(const QuadraticForm& qf, const SubspaceSpec& spec) {
  const Eigen::Index r = spec.dim();
  // Rows of the basis on the causal coordinates; everything else must vanish.
  MatrixXd Bc(static_cast<Eigen::Index>(qf.coords.size()), r);
  for (std::size_t a = 0; a < qf.coords.size(); ++a) {
    Bc.row(static_cast<Eigen::Index>(a)) = spec.basis.row(qf.coords[a]);
  }
  if (r > 0 && std::abs(Bc.squaredNorm() - spec.basis.squaredNorm()) >
                   1e-12 * std::max(1.0, spec.basis.squaredNorm())) {
    throw NonCausalPattern("subspace basis has support outside the causal cone");
  }
  ReducedQuadratic rq;
  rq.Hr = Bc.transpose() * qf.H * Bc;
  rq.Hr = 0.5 * (rq.Hr + rq.Hr.transpose());
  rq.gr = Bc.transpose() * qf.g;
  rq.c = qf.c;
  return rq;
}

QDomainSolution solve_q_domain(const CompactSystem& cs, const SubspaceSpec& spec) {
  const ReducedQuadratic rq = reduce_quadratic(quadratic_form(cs), spec);
  QDomainSolution sol;
  if (spec.dim() == 0) {
    sol.alpha = VectorXd::Zero(0);
    sol.Q = MatrixXd::Zero(spec.rows(), spec.cols());
    sol.J = rq.c;
    return sol;
  }
  Eigen::LLT<MatrixXd> llt(rq.Hr);
  if (llt.info() != Eigen::Success) {
    throw NumericallyIndefinite("reduced Youla-domain Hessian is not positive definite");
  }
  sol.alpha = llt.solve(-rq.gr);
  sol.J = rq.value(sol.alpha);
  sol.Q = from_coordinates(sol.alpha, spec);
  return sol;
}

RecoveredController recover_controller(const MatrixXd& Q, const CompactSystem& cs,
                                       const SubspaceSpec& spec, bool qi_claimed) {
  RecoveredController rc;
  rc.K = h_map(Q, cs.G, cs.horizon);
  rc.off_subspace_residual = (rc.K - project(rc.K, spec)).cwiseAbs().maxCoeff();
  if (qi_claimed && rc.off_subspace_residual > kRecoveryTol) {
    throw SubspaceEscape("recovered controller leaves the subspace although QI was claimed",
                         rc.off_subspace_residual);
  }
  if (qi_claimed) rc.K = project(rc.K, spec);
  return rc;
}

}  // namespace dlqg
