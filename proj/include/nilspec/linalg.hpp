#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "nilspec/rational.hpp"

// Dense exact linear algebra over Q, sized for algebras of dimension < 20.

namespace nilspec {

using QVector = std::vector<Rational>;

QVector zero_vector(std::size_t n);
QVector unit_vector(std::size_t n, std::size_t i, Rational scale = 1);
bool is_zero(std::span<const Rational> v);

QVector operator+(const QVector& a, const QVector& b);
QVector operator-(const QVector& a, const QVector& b);
QVector operator-(const QVector& a);
QVector operator*(const Rational& s, const QVector& v);
QVector& operator+=(QVector& a, const QVector& b);
QVector& operator-=(QVector& a, const QVector& b);
/// a += s * b
void axpy(QVector& a, const Rational& s, const QVector& b);
Rational dot(std::span<const Rational> a, std::span<const Rational> b);

std::vector<double> to_double(std::span<const Rational> v);

class QMatrix {
 public:
  QMatrix() = default;
  QMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  static QMatrix identity(std::size_t n);
  static QMatrix from_rows(const std::vector<QVector>& rows);
  static QMatrix from_columns(const std::vector<QVector>& cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Rational& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Rational& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  QVector row(std::size_t r) const;
  QVector col(std::size_t c) const;
  std::vector<QVector> row_list() const;
  std::vector<QVector> column_list() const;

  QMatrix transpose() const;
  QVector operator*(const QVector& v) const;
  /// Row vector times matrix.
  QVector left_multiply(const QVector& v) const;
  QMatrix operator*(const QMatrix& m) const;
  QMatrix operator-(const QMatrix& m) const;

  friend bool operator==(const QMatrix&, const QMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

struct RowEchelon {
  QMatrix reduced;                    // reduced row echelon form
  std::vector<std::size_t> pivots;    // pivot column of each nonzero row
  std::size_t rank() const { return pivots.size(); }
};

RowEchelon rref(QMatrix m);
std::size_t rank(const QMatrix& m);
/// Basis of {x : m x = 0}, one vector per free column.
std::vector<QVector> nullspace(const QMatrix& m);
/// Some solution of m x = b, or nullopt when inconsistent.
std::optional<QVector> solve(const QMatrix& m, const QVector& b);
std::optional<QMatrix> inverse(const QMatrix& m);

/// A linear subspace of Q^n held as a reduced row-echelon basis.
class Subspace {
 public:
  explicit Subspace(std::size_t ambient = 0) : ambient_(ambient) {}
  static Subspace span(std::size_t ambient, const std::vector<QVector>& vectors);
  static Subspace whole(std::size_t ambient);

  std::size_t ambient() const { return ambient_; }
  std::size_t dim() const { return basis_.size(); }
  const std::vector<QVector>& basis() const { return basis_; }

  bool contains(const QVector& v) const;
  bool contains(const Subspace& other) const;
  friend bool operator==(const Subspace& a, const Subspace& b) {
    return a.ambient_ == b.ambient_ && a.basis_ == b.basis_;
  }

 private:
  std::size_t ambient_;
  std::vector<QVector> basis_;
};

}  // namespace nilspec
