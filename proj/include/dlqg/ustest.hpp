#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dlqg/model.hpp"
#include "dlqg/subspace.hpp"

namespace dlqg {

inline constexpr double kEigTol = 1e-6;
inline constexpr double kHessianStep = 1e-4;

enum class USVerdict { UsByStrongQi, UsBySampledConvexity, Inconclusive, NonconvexWitness };

std::string to_string(USVerdict verdict);

struct USCertificate {
  USVerdict verdict = USVerdict::Inconclusive;
  std::string test;
  bool heuristic = false;  // sampled verdicts are evidence, not proof
  int samples = 0;
  double min_eigenvalue = 0.0;
  std::optional<VectorXd> witness;  // alpha with lambda_min < -kEigTol

  bool certifies_us() const {
    return verdict == USVerdict::UsByStrongQi || verdict == USVerdict::UsBySampledConvexity;
  }
};

// f(alpha) = J(unvec(B alpha)) (or J~ for the Youla-domain variant) with its gradient.
class RestrictedCost {
 public:
  using Value = std::function<double(const VectorXd&)>;
  using Gradient = std::function<VectorXd(const VectorXd&)>;

  RestrictedCost(Eigen::Index dim, Value value, Gradient gradient)
      : dim_(dim), value_(std::move(value)), gradient_(std::move(gradient)) {}

  Eigen::Index dim() const { return dim_; }
  double value(const VectorXd& alpha) const { return value_(alpha); }
  VectorXd gradient(const VectorXd& alpha) const { return gradient_(alpha); }

 private:
  Eigen::Index dim_;
  Value value_;
  Gradient gradient_;
};

// The controller-domain cost on the subspace. Holds copies of its inputs.
RestrictedCost restricted_k_cost(const CompactSystem& cs, const SubspaceSpec& spec);
// The Youla-domain cost J~ on the same coordinates (a quadratic).
RestrictedCost restricted_q_cost(const CompactSystem& cs, const SubspaceSpec& spec);

USCertificate us_via_strong_qi(const SparsityPattern& S, const BinaryMatrix& Delta);
// Throws WrongSubspaceKind unless spec is a sparsity subspace.
USCertificate us_via_strong_qi(const SubspaceSpec& spec, const BinaryMatrix& Delta);

// Central differences of the gradient with step kHessianStep * (1 + |alpha_i|),
// symmetrized.
MatrixXd restricted_hessian(const RestrictedCost& rc, const VectorXd& alpha);

// Smallest Hessian eigenvalue over the origin, `extra_points` and `npoints`
// uniform draws from the ball of the given radius. Sampling only: a positive
// verdict is heuristic evidence of convexity on that ball.
USCertificate sampled_convexity_test(const RestrictedCost& rc, int npoints, double radius,
                                     std::uint64_t seed,
                                     const std::vector<VectorXd>& extra_points = {});

}  // namespace dlqg
