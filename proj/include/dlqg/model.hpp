#pragma once

#include <vector>

#include <Eigen/Dense>

namespace dlqg {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline constexpr double kPsdTol = 1e-9;
inline constexpr double kPdTol = 1e-9;

// Time-varying plant, noise and weight sequences over a horizon of N steps.
// Produced unchecked by the problem parser; validate_system_data() enforces
// shapes and definiteness.
struct SystemData {
  int horizon = 0;
  int n = 0;
  int m = 0;
  int p = 0;
  std::vector<MatrixXd> A;        // N, n x n
  std::vector<MatrixXd> B;        // N, n x m
  std::vector<MatrixXd> C;        // N, p x n
  std::vector<MatrixXd> M;        // N+1, n x n, PSD
  std::vector<MatrixXd> R;        // N, m x m, PD
  MatrixXd Sigma0;                // n x n, PSD
  std::vector<MatrixXd> SigmaW;   // N, n x n, PSD
  std::vector<MatrixXd> SigmaV;   // N, p x p, PD
  VectorXd mu0;                   // n
};

// Checks every shape and definiteness requirement. Symmetric inputs are
// replaced by (X + X^T)/2 before the eigenvalue tests.
// Throws DimensionMismatch or NotDefinite.
SystemData validate_system_data(SystemData raw);

// Stacked finite-horizon representation x = P11 w + P12 u, y = C x + v.
struct CompactSystem {
  int horizon = 0;
  int n = 0;
  int m = 0;
  int p = 0;

  MatrixXd A;        // n(N+1) x n(N+1), block diagonal
  MatrixXd B;        // n(N+1) x mN
  MatrixXd C;        // pN x n(N+1)
  MatrixXd Z;        // n(N+1) x n(N+1) block shift
  MatrixXd P11;      // (I - Z A)^{-1}
  MatrixXd P12;      // P11 Z B
  MatrixXd M;        // n(N+1) x n(N+1)
  MatrixXd R;        // mN x mN
  MatrixXd Sigma_w;  // n(N+1) x n(N+1)
  MatrixXd Sigma_v;  // pN x pN
  VectorXd mu_w;     // n(N+1)
  MatrixXd G;        // C P12, pN x mN, strictly block lower triangular

  MatrixXd M_half;
  MatrixXd R_half;
  MatrixXd Sigma_w_half;
  MatrixXd Sigma_v_half;

  // Moments of the Youla-domain quadratic
  //   J~(Q) = tr(R_tilde Q W_tilde Q^T) + 2 tr(L_tilde^T Q) + open_loop_cost
  MatrixXd R_tilde;       // R + P12^T M P12
  MatrixXd W_tilde;       // Sigma_v + C X C^T, X = P11 (Sigma_w + mu mu^T) P11^T
  MatrixXd L_tilde;       // P12^T M X C^T
  double open_loop_cost = 0.0;

  Eigen::Index state_dim() const { return n * (horizon + 1); }
  Eigen::Index input_dim() const { return m * horizon; }
  Eigen::Index output_dim() const { return p * horizon; }
};

CompactSystem assemble_compact(const SystemData& sys);

struct Trajectories {
  VectorXd x;  // n(N+1)
  VectorXd y;  // pN
  VectorXd u;  // mN
};

// Closed-loop response to u = K y. Throws NonCausalController.
Trajectories closed_loop_trajectories(const CompactSystem& cs, const MatrixXd& K,
                                      const VectorXd& w, const VectorXd& v);

// The linear closed-loop maps (w, v) -> x and (w, v) -> u for a fixed K, for
// pushing many noise samples through the same controller.
class ClosedLoopMap {
 public:
  ClosedLoopMap(const CompactSystem& cs, const MatrixXd& K);

  Trajectories apply(const VectorXd& w, const VectorXd& v) const;

  const MatrixXd& x_from_w() const { return x_w_; }
  const MatrixXd& x_from_v() const { return x_v_; }
  const MatrixXd& u_from_w() const { return u_w_; }
  const MatrixXd& u_from_v() const { return u_v_; }

 private:
  MatrixXd C_;
  MatrixXd x_w_, x_v_, u_w_, u_v_;
};

void require_causal_controller(const CompactSystem& cs, const MatrixXd& K);

}  // namespace dlqg
