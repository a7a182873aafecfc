#include "dlqg/subspace.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "dlqg/errors.hpp"
#include "dlqg/linalg.hpp"

namespace dlqg {

namespace {

constexpr double kQiRelTol = 1e-8;
constexpr double kQiAbsTol = 1e-12;

std::string shape_str(Eigen::Index r, Eigen::Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

void check_basis_causal(const MatrixXd& basis, int m, int p, int N) {
  const MatrixXd mask = causal_mask(static_cast<Eigen::Index>(m) * N,
                                    static_cast<Eigen::Index>(p) * N, m, p);
  const VectorXd allowed = vec(mask);
  for (Eigen::Index j = 0; j < basis.cols(); ++j) {
    for (Eigen::Index i = 0; i < basis.rows(); ++i) {
      if (allowed(i) == 0.0 && basis(i, j) != 0.0) {
        throw NonCausalPattern("subspace contains controllers acting on future outputs");
      }
    }
  }
}

// Largest off-subspace entry of P, or nullopt if P stays in the subspace.
std::optional<QiWitness> check_membership(const MatrixXd& P, const SubspaceSpec& spec) {
  const MatrixXd off = P - project(P, spec);
  const double residual = off.norm();
  if (residual <= std::max(kQiRelTol * P.norm(), kQiAbsTol)) return std::nullopt;
  QiWitness w;
  w.product = P;
  w.residual = residual;
  off.cwiseAbs().maxCoeff(&w.row, &w.col);
  return w;
}

}  // namespace

BinaryMatrix struct_of(const MatrixXd& Y, double zero_tol) {
  return (Y.array().abs() > zero_tol).cast<int>().matrix();
}

bool binary_le(const BinaryMatrix& X, const BinaryMatrix& Xhat) {
  if (X.rows() != Xhat.rows() || X.cols() != Xhat.cols()) {
    throw DimensionMismatch("binary_le: " + shape_str(X.rows(), X.cols()) + " vs " +
                            shape_str(Xhat.rows(), Xhat.cols()));
  }
  return (X.array() <= Xhat.array()).all();
}

BinaryMatrix binary_product(const BinaryMatrix& X, const BinaryMatrix& Z) {
  if (X.cols() != Z.rows()) {
    throw DimensionMismatch("binary_product: " + shape_str(X.rows(), X.cols()) + " times " +
                            shape_str(Z.rows(), Z.cols()));
  }
  // Entries are 0/1 so counts stay below the inner dimension; saturate after.
  return ((X * Z).array() > 0).cast<int>().matrix();
}

BinaryMatrix causal_pattern(int m, int p, int N) {
  return causal_mask(static_cast<Eigen::Index>(m) * N, static_cast<Eigen::Index>(p) * N, m, p)
      .cast<int>();
}

BinaryMatrix kron_causal(const BinaryMatrix& S_small, int N) {
  const Eigen::Index m = S_small.rows(), p = S_small.cols();
  BinaryMatrix S = BinaryMatrix::Zero(m * N, p * N);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j <= i; ++j) S.block(i * m, j * p, m, p) = S_small;
  }
  return S;
}

SparsityPattern SparsityPattern::make(BinaryMatrix S, int m, int p, int N) {
  if (m < 1 || p < 1 || N < 1) throw DimensionMismatch("pattern dims must be positive");
  if (S.rows() != static_cast<Eigen::Index>(m) * N ||
      S.cols() != static_cast<Eigen::Index>(p) * N) {
    throw DimensionMismatch("sparsity pattern must be " + shape_str(m * N, p * N) + ", got " +
                            shape_str(S.rows(), S.cols()));
  }
  if (!((S.array() == 0) || (S.array() == 1)).all()) {
    throw std::invalid_argument("sparsity pattern entries must be 0 or 1");
  }
  if (!binary_le(S, causal_pattern(m, p, N))) {
    throw NonCausalPattern("sparsity pattern has a one above the block diagonal");
  }
  return SparsityPattern(std::move(S), m, p, N);
}

BinaryMatrix binary_delta(const MatrixXd& G, double zero_tol) { return struct_of(G, zero_tol); }

std::string to_string(SubspaceKind kind) {
  switch (kind) {
    case SubspaceKind::Sparsity: return "sparsity";
    case SubspaceKind::StaticDiag: return "static_diag";
    case SubspaceKind::StaticPattern: return "static_pattern";
    case SubspaceKind::ExplicitBasis: return "explicit_basis";
  }
  return "unknown";
}

BinaryMatrix SubspaceSpec::envelope() const {
  if (pattern) return pattern->matrix();
  VectorXd support = VectorXd::Zero(rows() * cols());
  for (Eigen::Index j = 0; j < basis.cols(); ++j) support += basis.col(j).cwiseAbs();
  return struct_of(unvec(support, rows(), cols()), 0.0);
}

SubspaceSpec sparsity_subspace(const SparsityPattern& S) {
  SubspaceSpec spec;
  spec.kind = SubspaceKind::Sparsity;
  spec.m = S.m();
  spec.p = S.p();
  spec.N = S.horizon();
  spec.pattern = S;
  const Eigen::Index total = spec.rows() * spec.cols();
  spec.basis = MatrixXd::Zero(total, S.ones());
  // Column-major scan of the free entries.
  Eigen::Index col = 0;
  for (Eigen::Index c = 0; c < spec.cols(); ++c) {
    for (Eigen::Index r = 0; r < spec.rows(); ++r) {
      if (S.matrix()(r, c) == 1) spec.basis(c * spec.rows() + r, col++) = 1.0;
    }
  }
  return spec;
}

SubspaceSpec static_pattern_subspace(const BinaryMatrix& S_small, int N) {
  if (N < 1 || S_small.rows() < 1 || S_small.cols() < 1) {
    throw DimensionMismatch("static pattern needs N >= 1 and a nonempty per-step pattern");
  }
  if (!((S_small.array() == 0) || (S_small.array() == 1)).all()) {
    throw std::invalid_argument("static pattern entries must be 0 or 1");
  }
  SubspaceSpec spec;
  spec.kind = SubspaceKind::StaticPattern;
  spec.m = static_cast<int>(S_small.rows());
  spec.p = static_cast<int>(S_small.cols());
  spec.N = N;
  spec.small_pattern = S_small;
  const Eigen::Index total = spec.rows() * spec.cols();
  spec.basis = MatrixXd::Zero(total, S_small.sum());
  const double scale = 1.0 / std::sqrt(static_cast<double>(N));
  Eigen::Index col = 0;
  for (Eigen::Index j = 0; j < S_small.cols(); ++j) {
    for (Eigen::Index i = 0; i < S_small.rows(); ++i) {
      if (S_small(i, j) != 1) continue;
      for (int t = 0; t < N; ++t) {
        const Eigen::Index r = t * spec.m + i, c = t * spec.p + j;
        spec.basis(c * spec.rows() + r, col) = scale;
      }
      ++col;
    }
  }
  return spec;
}

SubspaceSpec static_diag_subspace(int m, int p, int N) {
  if (m < 1 || p < 1) throw DimensionMismatch("static_diag needs m, p >= 1");
  BinaryMatrix S_small = BinaryMatrix::Zero(m, p);
  for (int i = 0; i < std::min(m, p); ++i) S_small(i, i) = 1;
  SubspaceSpec spec = static_pattern_subspace(S_small, N);
  spec.kind = SubspaceKind::StaticDiag;
  return spec;
}

SubspaceSpec explicit_subspace(const std::vector<MatrixXd>& span, int m, int p, int N) {
  SubspaceSpec spec;
  spec.kind = SubspaceKind::ExplicitBasis;
  spec.m = m;
  spec.p = p;
  spec.N = N;
  const Eigen::Index total = spec.rows() * spec.cols();
  MatrixXd raw(total, static_cast<Eigen::Index>(span.size()));
  for (std::size_t k = 0; k < span.size(); ++k) {
    if (span[k].rows() != spec.rows() || span[k].cols() != spec.cols()) {
      throw DimensionMismatch("basis matrix " + std::to_string(k) + " must be " +
                              shape_str(spec.rows(), spec.cols()));
    }
    raw.col(static_cast<Eigen::Index>(k)) = vec(span[k]);
  }
  check_basis_causal(raw, m, p, N);
  if (raw.cols() == 0) {
    spec.basis = MatrixXd::Zero(total, 0);
    return spec;
  }
  Eigen::ColPivHouseholderQR<MatrixXd> qr(raw);
  qr.setThreshold(1e-12);
  const Eigen::Index rank = qr.rank();
  MatrixXd Q = qr.householderQ() * MatrixXd::Identity(total, rank);
  // Householder reflections leave round-off outside the causal support.
  const VectorXd allowed = vec(causal_mask(spec.rows(), spec.cols(), m, p));
  for (Eigen::Index i = 0; i < total; ++i) {
    if (allowed(i) == 0.0) Q.row(i).setZero();
  }
  spec.basis = Q;
  return spec;
}

MatrixXd project(const MatrixXd& K, const SubspaceSpec& spec) {
  if (K.rows() != spec.rows() || K.cols() != spec.cols()) {
    throw DimensionMismatch("project: controller must be " + shape_str(spec.rows(), spec.cols()));
  }
  if (spec.pattern) return K.cwiseProduct(spec.pattern->matrix().cast<double>());
  if (spec.dim() == 0) return MatrixXd::Zero(K.rows(), K.cols());
  return unvec(spec.basis * (spec.basis.transpose() * vec(K)), K.rows(), K.cols());
}

MatrixXd from_coordinates(const VectorXd& alpha, const SubspaceSpec& spec) {
  if (alpha.size() != spec.dim()) throw DimensionMismatch("coordinate vector has wrong length");
  if (spec.dim() == 0) return MatrixXd::Zero(spec.rows(), spec.cols());
  return unvec(spec.basis * alpha, spec.rows(), spec.cols());
}

VectorXd to_coordinates(const MatrixXd& K, const SubspaceSpec& spec) {
  if (K.rows() != spec.rows() || K.cols() != spec.cols()) {
    throw DimensionMismatch("to_coordinates: controller must be " +
                            shape_str(spec.rows(), spec.cols()));
  }
  return spec.basis.transpose() * vec(K);
}

bool qi_test_binary(const BinaryMatrix& S, const BinaryMatrix& Delta) {
  if (Delta.rows() != S.cols() || Delta.cols() != S.rows()) {
    throw DimensionMismatch("qi_test_binary: S is " + shape_str(S.rows(), S.cols()) +
                            " but Delta is " + shape_str(Delta.rows(), Delta.cols()));
  }
  return binary_le(binary_product(binary_product(S, Delta), S), S);
}

QiDefinitionResult qi_test_definition(const SubspaceSpec& spec, const MatrixXd& G, int trials,
                                      std::uint64_t seed) {
  if (G.rows() != spec.cols() || G.cols() != spec.rows()) {
    throw DimensionMismatch("qi_test_definition: G must be " + shape_str(spec.cols(), spec.rows()));
  }
  QiDefinitionResult result;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  auto sample = [&] {
    VectorXd alpha(spec.dim());
    for (Eigen::Index i = 0; i < alpha.size(); ++i) alpha(i) = normal(rng);
    return from_coordinates(alpha, spec);
  };
  for (int t = 0; t < trials; ++t) {
    ++result.trials;
    const MatrixXd K = sample();
    const MatrixXd K1 = sample();
    const MatrixXd K2 = sample();
    if (result.qi) {
      if (auto w = check_membership(K * G * K, spec)) {
        result.qi = false;
        result.qi_witness = w;
        // K1 = K2 = K is also a strong-QI counterexample.
        if (result.strong_qi) {
          result.strong_qi = false;
          result.strong_witness = std::move(w);
        }
      }
    }
    if (result.strong_qi) {
      if (auto w = check_membership(K1 * G * K2, spec)) {
        result.strong_qi = false;
        result.strong_witness = std::move(w);
      }
    }
    if (!result.qi && !result.strong_qi) break;
  }
  return result;
}

}  // namespace dlqg
