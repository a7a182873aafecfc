#include "dlqg/ustest.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "dlqg/cost.hpp"
#include "dlqg/errors.hpp"
#include "dlqg/linalg.hpp"

namespace dlqg {

std::string to_string(USVerdict verdict) {
  switch (verdict) {
    case USVerdict::UsByStrongQi: return "US_BY_STRONG_QI";
    case USVerdict::UsBySampledConvexity: return "US_BY_SAMPLED_CONVEXITY";
    case USVerdict::Inconclusive: return "INCONCLUSIVE";
    case USVerdict::NonconvexWitness: return "NONCONVEX_WITNESS";
  }
  return "INCONCLUSIVE";
}

RestrictedCost restricted_k_cost(const CompactSystem& cs, const SubspaceSpec& spec) {
  return RestrictedCost(
      spec.dim(),
      [cs, spec](const VectorXd& alpha) { return cost_k(cs, from_coordinates(alpha, spec)); },
      [cs, spec](const VectorXd& alpha) {
        return to_coordinates(grad_k(cs, from_coordinates(alpha, spec)), spec);
      });
}

RestrictedCost restricted_q_cost(const CompactSystem& cs, const SubspaceSpec& spec) {
  return RestrictedCost(
      spec.dim(),
      [cs, spec](const VectorXd& alpha) { return cost_q(cs, from_coordinates(alpha, spec)); },
      [cs, spec](const VectorXd& alpha) {
        return to_coordinates(grad_q(cs, from_coordinates(alpha, spec)), spec);
      });
}

USCertificate us_via_strong_qi(const SparsityPattern& S, const BinaryMatrix& Delta) {
  USCertificate cert;
  cert.test = "binary strong-QI test S Delta S <= S";
  // Failing QI does not refute unique stationarity.
  cert.verdict = qi_test_binary(S, Delta) ? USVerdict::UsByStrongQi : USVerdict::Inconclusive;
  return cert;
}

USCertificate us_via_strong_qi(const SubspaceSpec& spec, const BinaryMatrix& Delta) {
  if (spec.kind != SubspaceKind::Sparsity || !spec.pattern) {
    throw WrongSubspaceKind("the binary strong-QI test needs a sparsity subspace, got " +
                            to_string(spec.kind));
  }
  return us_via_strong_qi(*spec.pattern, Delta);
}

MatrixXd restricted_hessian(const RestrictedCost& rc, const VectorXd& alpha) {
  const Eigen::Index r = rc.dim();
  MatrixXd H(r, r);
  VectorXd probe = alpha;
  for (Eigen::Index i = 0; i < r; ++i) {
    const double h = kHessianStep * (1.0 + std::abs(alpha(i)));
    probe(i) = alpha(i) + h;
    const VectorXd g_plus = rc.gradient(probe);
    probe(i) = alpha(i) - h;
    const VectorXd g_minus = rc.gradient(probe);
    probe(i) = alpha(i);
    H.col(i) = (g_plus - g_minus) / (2.0 * h);
  }
  return symmetrize(H);
}

USCertificate sampled_convexity_test(const RestrictedCost& rc, int npoints, double radius,
                                     std::uint64_t seed,
                                     const std::vector<VectorXd>& extra_points) {
  if (npoints < 1) throw std::invalid_argument("sampled_convexity_test: npoints must be >= 1");
  const Eigen::Index r = rc.dim();
  USCertificate cert;
  cert.test = "sampled restricted-Hessian convexity";
  cert.heuristic = true;
  if (r == 0) {
    cert.verdict = USVerdict::UsBySampledConvexity;
    cert.test = "trivial (zero-dimensional subspace)";
    return cert;
  }

  std::vector<VectorXd> points;
  points.push_back(VectorXd::Zero(r));
  points.insert(points.end(), extra_points.begin(), extra_points.end());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (int k = 0; k < npoints; ++k) {
    VectorXd dir(r);
    for (Eigen::Index i = 0; i < r; ++i) dir(i) = normal(rng);
    const double norm = dir.norm();
    if (norm == 0.0) continue;
    const double scale = radius * std::pow(uniform(rng), 1.0 / static_cast<double>(r));
    points.push_back(dir * (scale / norm));
  }

  double lowest = std::numeric_limits<double>::infinity();
  VectorXd argmin;
  for (const auto& alpha : points) {
    const double lam = min_eigenvalue(restricted_hessian(rc, alpha));
    if (lam < lowest) {
      lowest = lam;
      argmin = alpha;
    }
  }
  cert.samples = static_cast<int>(points.size());
  cert.min_eigenvalue = lowest;
  if (lowest < -kEigTol) {
    cert.verdict = USVerdict::NonconvexWitness;
    cert.witness = argmin;
  } else if (lowest > kEigTol) {
    cert.verdict = USVerdict::UsBySampledConvexity;
  } else {
    cert.verdict = USVerdict::Inconclusive;
  }
  return cert;
}

}  // namespace dlqg
