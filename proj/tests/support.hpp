#pragma once

// Shared fixtures for the test suites: the two reference instances, random
// small instances and finite-difference oracles. Nothing here calls into the
// gradient code under test.

#include <cstdint>
#include <functional>
#include <random>

#include <Eigen/Dense>

#include "dlqg/model.hpp"
#include "dlqg/subspace.hpp"

namespace dlqg::testing {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline SystemData time_invariant(int N, const MatrixXd& A, const MatrixXd& B, const MatrixXd& C,
                                 const MatrixXd& M, const MatrixXd& R, const MatrixXd& Sigma0,
                                 const MatrixXd& SigmaW, const MatrixXd& SigmaV,
                                 const VectorXd& mu0) {
  SystemData s;
  s.horizon = N;
  s.n = static_cast<int>(A.rows());
  s.m = static_cast<int>(B.cols());
  s.p = static_cast<int>(C.rows());
  s.A.assign(N, A);
  s.B.assign(N, B);
  s.C.assign(N, C);
  s.M.assign(N + 1, M);
  s.R.assign(N, R);
  s.Sigma0 = Sigma0;
  s.SigmaW.assign(N, SigmaW);
  s.SigmaV.assign(N, SigmaV);
  s.mu0 = mu0;
  return s;
}

// Five-state, N = 3 instance with the T (x) S pattern.
inline SystemData example1_system() {
  MatrixXd A(5, 5);
  A << 1.6, 0, 0, 0, 0,
       0.5, 1.6, 0, 0, 0,
       2.5, 2.5, -1.4, 0, 0,
       -2, 1, -2, 0.1, 0,
       0, 2, 0, -0.5, 1.1;
  const MatrixXd I = MatrixXd::Identity(5, 5);
  VectorXd mu(5);
  mu << 1, -1, 2, -3, 3;
  return time_invariant(3, A, I, I, I, I, I, I, I, mu);
}

inline BinaryMatrix example1_small_pattern() {
  BinaryMatrix S = BinaryMatrix::Zero(5, 5);
  S(1, 1) = S(2, 1) = S(3, 1) = S(4, 1) = S(4, 4) = 1;
  return S;
}

inline SparsityPattern example1_pattern() {
  return SparsityPattern::make(kron_causal(example1_small_pattern(), 3), 5, 5, 3);
}

// Two-state, N = 2 instance with static decentralized control.
inline SystemData example2_system() {
  MatrixXd A(2, 2);
  A << 1, 2, -1, -3;
  const MatrixXd I = MatrixXd::Identity(2, 2);
  VectorXd mu(2);
  mu << 0, 1;
  return time_invariant(2, A, I, I, I, I, I, MatrixXd::Zero(2, 2), I, mu);
}

// 4a^4 + 8a^3 + 28a^2 + 18ab - 38a + 6b^4 - 42b^3 + 149b^2 - 216b + 166
inline double example2_polynomial(double a, double b) {
  return 4 * std::pow(a, 4) + 8 * std::pow(a, 3) + 28 * a * a + 18 * a * b - 38 * a +
         6 * std::pow(b, 4) - 42 * std::pow(b, 3) + 149 * b * b - 216 * b + 166;
}

inline MatrixXd example2_hessian(double a, double b) {
  MatrixXd H(2, 2);
  H << 48 * a * a + 48 * a + 56, 18, 18, 72 * b * b - 252 * b + 298;
  return H;
}

inline MatrixXd static_diag_controller(double a, double b, int N) {
  MatrixXd K = MatrixXd::Zero(2 * N, 2 * N);
  for (int t = 0; t < N; ++t) {
    K(2 * t, 2 * t) = a;
    K(2 * t + 1, 2 * t + 1) = b;
  }
  return K;
}

inline MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c,
                              double scale = 1.0, double density = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  MatrixXd X(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) X(i, j) = u(rng) < density ? normal(rng) : 0.0;
  return X;
}

inline MatrixXd random_psd(std::mt19937_64& rng, Eigen::Index n, double shift) {
  const MatrixXd L = random_matrix(rng, n, n, 0.5);
  return L * L.transpose() + shift * MatrixXd::Identity(n, n);
}

struct RandomDims {
  int n, m, p, N;
};

inline RandomDims random_dims(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(1, 3);
  return {d(rng), d(rng), d(rng), d(rng)};
}

// Random time-varying plant with sparse dynamics, PSD state weights and
// covariances and PD input weights / measurement noise.
inline SystemData random_system(std::mt19937_64& rng, const RandomDims& d, double density = 0.6) {
  SystemData s;
  s.horizon = d.N;
  s.n = d.n;
  s.m = d.m;
  s.p = d.p;
  for (int t = 0; t < d.N; ++t) {
    s.A.push_back(random_matrix(rng, d.n, d.n, 0.6, density));
    s.B.push_back(random_matrix(rng, d.n, d.m, 1.0, density));
    s.C.push_back(random_matrix(rng, d.p, d.n, 1.0, density));
    s.R.push_back(random_psd(rng, d.m, 0.5));
    s.SigmaW.push_back(random_psd(rng, d.n, 0.0));
    s.SigmaV.push_back(random_psd(rng, d.p, 0.5));
  }
  for (int t = 0; t <= d.N; ++t) s.M.push_back(random_psd(rng, d.n, 0.0));
  s.Sigma0 = random_psd(rng, d.n, 0.0);
  s.mu0 = random_matrix(rng, d.n, 1);
  return s;
}

inline BinaryMatrix random_causal_pattern(std::mt19937_64& rng, int m, int p, int N,
                                          double density) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  BinaryMatrix S = causal_pattern(m, p, N);
  for (Eigen::Index j = 0; j < S.cols(); ++j)
    for (Eigen::Index i = 0; i < S.rows(); ++i)
      if (S(i, j) && u(rng) >= density) S(i, j) = 0;
  return S;
}

// Smallest pattern containing S that passes S Delta S <= S; the iteration
// only adds strictly-causal products, so it stays causal and terminates.
inline BinaryMatrix qi_closure(BinaryMatrix S, const BinaryMatrix& Delta) {
  for (;;) {
    const BinaryMatrix SDS = ((S * Delta * S).array() > 0).cast<int>().matrix();
    const BinaryMatrix next = ((S + SDS).array() > 0).cast<int>().matrix();
    if (next == S) return S;
    S = next;
  }
}

inline MatrixXd random_causal(std::mt19937_64& rng, int m, int p, int N, double scale = 1.0) {
  MatrixXd K = random_matrix(rng, static_cast<Eigen::Index>(m) * N,
                             static_cast<Eigen::Index>(p) * N, scale);
  return K.cwiseProduct(causal_pattern(m, p, N).cast<double>());
}

// Central finite-difference gradient over the causal entries of X.
inline MatrixXd fd_gradient(const std::function<double(const MatrixXd&)>& f, const MatrixXd& X,
                            const BinaryMatrix& support) {
  MatrixXd G = MatrixXd::Zero(X.rows(), X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      if (!support(i, j)) continue;
      const double h = 1e-5 * (1.0 + std::abs(X(i, j)));
      MatrixXd Xp = X, Xm = X;
      Xp(i, j) += h;
      Xm(i, j) -= h;
      G(i, j) = (f(Xp) - f(Xm)) / (2.0 * h);
    }
  }
  return G;
}

inline double rel_err(const MatrixXd& a, const MatrixXd& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

}  // namespace dlqg::testing
