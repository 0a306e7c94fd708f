#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nilspec/linalg.hpp"

namespace nilspec {

struct Filtration {
  std::vector<Subspace> derived;  // derived[0] = g^(1), derived[1] = g^(2), ... (nonzero terms only)
  Subspace center;
  int step = -1;                  // -1 when the series stabilizes above zero
  bool nilpotent() const { return step >= 0; }
  /// g^(k) for k >= 0, with g^(0) = g and the zero space past the end.
  Subspace term(int k) const;
};

/// One nonzero structure constant: [b_i, b_j] has coefficient `value` on b_k.
struct BracketTerm {
  std::size_t i;
  std::size_t j;
  std::size_t k;
  Rational value;
};

/// Finite-dimensional real Lie algebra given by exact structure constants
/// c[i][j][k] = coefficient of b_k in [b_i, b_j].
class LieAlgebra {
 public:
  LieAlgebra() = default;

  /// Builds the tensor from terms for i < j; the (j, i) entries are filled by antisymmetry.
  static LieAlgebra from_brackets(std::vector<std::string> labels, const std::vector<BracketTerm>& terms,
                                  int declared_step = 0);
  /// Takes the raw tensor verbatim (no antisymmetrization), for validation of foreign input.
  static LieAlgebra from_tensor(std::vector<std::string> labels,
                                std::vector<std::vector<std::vector<Rational>>> c, int declared_step = 0);

  std::size_t dim() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  int declared_step() const { return declared_step_; }
  const Rational& constant(std::size_t i, std::size_t j, std::size_t k) const {
    return c_[(i * dim() + j) * dim() + k];
  }
  /// Nonzero constants in (i, j, k) order, including both orders of each pair.
  const std::vector<BracketTerm>& terms() const { return terms_; }

  /// Nilpotency step computed from the derived series; -1 when not nilpotent.
  int step() const { return filtration_.step; }
  const Filtration& filtration() const { return filtration_; }

  QVector bracket(const QVector& x, const QVector& y) const;
  std::vector<double> bracket(const std::vector<double>& x, const std::vector<double>& y) const;
  /// Matrix of ad(x): column j is [x, b_j].
  QMatrix ad(const QVector& x) const;

  QVector basis_vector(std::size_t i) const { return unit_vector(dim(), i); }
  std::optional<std::size_t> index_of(const std::string& label) const;

 private:
  void index_terms();

  std::vector<std::string> labels_;
  std::vector<Rational> c_;
  std::vector<BracketTerm> terms_;
  std::vector<double> dterms_;
  int declared_step_ = 0;
  Filtration filtration_;
};

QVector bracket(const QVector& x, const QVector& y, const LieAlgebra& L);

struct StructureReport {
  struct Triple {
    std::size_t i, j, k;
  };
  std::vector<Triple> antisymmetry;  // c[i][j][k] != -c[j][i][k]
  std::vector<Triple> jacobi;        // basis triples i < j < k with a nonzero Jacobiator
  bool step_mismatch = false;        // declared step differs from the computed one
  bool ok() const { return antisymmetry.empty() && jacobi.empty() && !step_mismatch; }
};

StructureReport check_structure(const LieAlgebra& L);

Filtration derived_series(const LieAlgebra& L);

/// Exact check that [g, g^(k)] lies in g^(k+1) for every k, on basis generators.
bool derived_series_compatible(const LieAlgebra& L, const Filtration& f);

/// Left-invariant metric given by a frame declared orthonormal. Rows of `frame`
/// are the frame vectors written in the structural basis.
class Metric {
 public:
  Metric() = default;
  explicit Metric(QMatrix frame);
  static Metric identity(std::size_t n);

  std::size_t dim() const { return frame_.rows(); }
  const QMatrix& frame() const { return frame_; }
  /// Coefficients of v in the orthonormal frame.
  QVector frame_coords(const QVector& v) const { return inverse_.left_multiply(v); }
  Rational inner(const QVector& u, const QVector& v) const;
  Rational norm2(const QVector& v) const { return inner(v, v); }
  QMatrix gram() const;

 private:
  QMatrix frame_;
  QMatrix inverse_;
};

/// Metric orthogonal complement of `sub` inside `within`.
Subspace orthogonal_complement(const Subspace& sub, const Subspace& within, const Metric& m);
/// Metric orthogonal projection of v onto `sub`.
QVector orthogonal_projection(const QVector& v, const Subspace& sub, const Metric& m);
/// Exact orthonormal basis of `sub`. Throws std::domain_error when a normalization is irrational.
std::vector<QVector> orthonormal_basis(const Subspace& sub, const Metric& m);

/// Orthonormal frame split nu + zeta + g^(2) with the structure constants
///   [X_i, X_j] = sum_k A_ij^k Z_k + sum_t B_ij^t W_t,   [X_i, Z_k] = sum_t C_ik^t W_t.
struct AdaptedFrame {
  std::vector<QVector> X, Z, W;
  std::size_t J = 0, K = 0, T = 0;
  // Flattened tensors: A[(i*J + j)*K + k], B[(i*J + j)*T + t], C[(i*K + k)*T + t].
  std::vector<Rational> A, B, C;
  // Full structure constants in the frame: f[(a*n + b)*n + c] = <[E_a, E_b], E_c>.
  std::vector<Rational> f;

  std::size_t dim() const { return J + K + T; }
  const Rational& a(std::size_t i, std::size_t j, std::size_t k) const { return A[(i * J + j) * K + k]; }
  const Rational& b(std::size_t i, std::size_t j, std::size_t t) const { return B[(i * J + j) * T + t]; }
  const Rational& c(std::size_t i, std::size_t k, std::size_t t) const { return C[(i * K + k) * T + t]; }
  const Rational& structure(std::size_t a, std::size_t b, std::size_t c) const {
    return f[(a * dim() + b) * dim() + c];
  }
  /// Frame vectors X..., Z..., W... as rows in the structural basis.
  QMatrix frame_matrix() const;
  /// Structural vector -> frame coefficients.
  QVector to_frame(const QVector& v) const;
  /// Frame coefficients -> structural vector.
  QVector from_frame(const QVector& a) const;
  QMatrix inverse_frame;  // rows map structural coordinates to frame coefficients (v * inverse_frame)
};

AdaptedFrame adapted_frame(const LieAlgebra& L, const Metric& m);

/// True when the adapted-frame invariants hold exactly.
bool adapted_frame_consistent(const LieAlgebra& L, const Metric& m, const AdaptedFrame& F);

enum class NonsingularVerdict { proven_false, passed_randomized };

struct NonsingularityResult {
  NonsingularVerdict verdict = NonsingularVerdict::passed_randomized;
  bool degenerate = false;  // vacuous: no noncentral elements, or zero center
  std::optional<QVector> witness;
  int trials = 0;
};

/// Checks z subset ad(X)(g) exactly for every noncentral basis vector, then for
/// `trials` random integer combinations drawn from a seeded generator.
NonsingularityResult is_strictly_nonsingular(const LieAlgebra& L, int trials = 100, std::uint64_t seed = 1);
/// Exact test of z subset ad(X)(g) for one X.
bool nonsingular_at(const LieAlgebra& L, const Filtration& f, const QVector& x);

/// g / g^(k-1) with the metric restricted to the orthogonal complement of g^(k-1).
struct Quotient {
  LieAlgebra algebra;
  Metric metric;
  QMatrix proj;     // nbar x n, coordinates of the image of a structural vector
  QMatrix section;  // n x nbar, horizontal lift: orthogonal to g^(k-1) and proj * section = 1
  Subspace kernel;  // g^(k-1)
  std::vector<std::size_t> kept;  // structural basis indices whose images form the quotient basis
  QVector project(const QVector& v) const { return proj * v; }
  QVector lift(const QVector& v) const { return section * v; }
};

Quotient quotient_algebra(const LieAlgebra& L, const Metric& m);

}  // namespace nilspec
