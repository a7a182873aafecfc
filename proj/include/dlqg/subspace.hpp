#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dlqg {

using Eigen::MatrixXd;
using Eigen::MatrixXi;
using Eigen::VectorXd;

inline constexpr double kStructZeroTol = 1e-10;

// Binary matrices are stored as 0/1 integer matrices.
using BinaryMatrix = MatrixXi;

// Struct(Y): 1 where |Y_ij| > zero_tol.
BinaryMatrix struct_of(const MatrixXd& Y, double zero_tol = kStructZeroTol);

// Elementwise X <= Xhat. Throws DimensionMismatch.
bool binary_le(const BinaryMatrix& X, const BinaryMatrix& Xhat);

// Struct(X Z), the saturating boolean product. Throws DimensionMismatch.
BinaryMatrix binary_product(const BinaryMatrix& X, const BinaryMatrix& Z);

// Block lower-triangular all-ones mask (m x p blocks, N x N block grid).
BinaryMatrix causal_pattern(int m, int p, int N);

// T (x) S_small where T is the N x N lower-triangular ones matrix.
BinaryMatrix kron_causal(const BinaryMatrix& S_small, int N);

// A binary mN x pN controller pattern. Construct through make().
class SparsityPattern {
 public:
  // Throws DimensionMismatch on shape, NonCausalPattern if S has a one above
  // the block diagonal, std::invalid_argument for entries outside {0,1}.
  static SparsityPattern make(BinaryMatrix S, int m, int p, int N);

  const BinaryMatrix& matrix() const { return S_; }
  int m() const { return m_; }
  int p() const { return p_; }
  int horizon() const { return N_; }
  Eigen::Index ones() const { return S_.sum(); }

 private:
  SparsityPattern(BinaryMatrix S, int m, int p, int N) : S_(std::move(S)), m_(m), p_(p), N_(N) {}
  BinaryMatrix S_;
  int m_, p_, N_;
};

// Struct(C P12) for a given plant.
BinaryMatrix binary_delta(const MatrixXd& G, double zero_tol = kStructZeroTol);

enum class SubspaceKind { Sparsity, StaticDiag, StaticPattern, ExplicitBasis };

std::string to_string(SubspaceKind kind);

// A controller subspace together with an orthonormal basis of vec(K).
struct SubspaceSpec {
  SubspaceKind kind = SubspaceKind::Sparsity;
  int m = 0, p = 0, N = 0;
  MatrixXd basis;                        // (mN * pN) x r, orthonormal columns
  std::optional<SparsityPattern> pattern;  // Sparsity kind only
  BinaryMatrix small_pattern;            // static kinds: the m x p per-step pattern

  Eigen::Index dim() const { return basis.cols(); }
  Eigen::Index rows() const { return static_cast<Eigen::Index>(m) * N; }
  Eigen::Index cols() const { return static_cast<Eigen::Index>(p) * N; }

  // Struct of the union of all basis supports: the smallest sparsity pattern
  // containing the subspace.
  BinaryMatrix envelope() const;
};

SubspaceSpec sparsity_subspace(const SparsityPattern& S);
// K = I_N (x) K_small with K_small free on the ones of S_small.
SubspaceSpec static_pattern_subspace(const BinaryMatrix& S_small, int N);
// K = I_N (x) diag(k_1, ..., k_min(m,p)).
SubspaceSpec static_diag_subspace(int m, int p, int N);
// Span of the given mN x pN matrices, orthonormalized. Throws NonCausalPattern
// if any spanning matrix has support above the block diagonal.
SubspaceSpec explicit_subspace(const std::vector<MatrixXd>& span, int m, int p, int N);

// Orthogonal projection onto the subspace. For the sparsity kind this is K (.) S.
MatrixXd project(const MatrixXd& K, const SubspaceSpec& spec);

// Element of the subspace with the given basis coordinates, and the reverse.
MatrixXd from_coordinates(const VectorXd& alpha, const SubspaceSpec& spec);
VectorXd to_coordinates(const MatrixXd& K, const SubspaceSpec& spec);

// S Delta S <= S. Throws DimensionMismatch.
bool qi_test_binary(const BinaryMatrix& S, const BinaryMatrix& Delta);
inline bool qi_test_binary(const SparsityPattern& S, const BinaryMatrix& Delta) {
  return qi_test_binary(S.matrix(), Delta);
}

struct QiWitness {
  MatrixXd product;     // K1 G K2 (or K G K) that leaves the subspace
  Eigen::Index row = 0;  // largest off-subspace entry
  Eigen::Index col = 0;
  double residual = 0.0;  // Frobenius norm of the off-subspace part
};

struct QiDefinitionResult {
  bool strong_qi = true;
  bool qi = true;
  int trials = 0;
  std::optional<QiWitness> strong_witness;
  std::optional<QiWitness> qi_witness;
};

// Randomized falsification of K G K in K (QI) and K1 G K2 in K (strong QI).
QiDefinitionResult qi_test_definition(const SubspaceSpec& spec, const MatrixXd& G, int trials,
                                      std::uint64_t seed);

}  // namespace dlqg
