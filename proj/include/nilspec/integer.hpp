#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

// Small integer lattices: column Hermite normal form with a unimodular transform.

namespace nilspec {

using IVector = std::vector<std::int64_t>;

class IMatrix {
 public:
  IMatrix() = default;
  IMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0) {}
  static IMatrix identity(std::size_t n);
  static IMatrix from_columns(std::size_t rows, const std::vector<IVector>& cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::int64_t& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  std::int64_t operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  IVector col(std::size_t c) const;
  IVector operator*(const IVector& v) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::int64_t> data_;
};

/// M * U = [H | 0] with H in column echelon form: column c has its first nonzero
/// entry (positive) in row pivots[c], and entries of earlier columns in that row
/// lie in [0, pivot).
struct ColumnHermite {
  IMatrix H;  // rows x rank
  IMatrix U;  // cols x cols, unimodular
  std::vector<std::size_t> pivots;
  std::size_t source_cols = 0;

  std::size_t rank() const { return pivots.size(); }
  std::size_t ambient() const { return H.rows(); }
  bool full_rank() const { return rank() == ambient(); }
  /// [Z^m : lattice] when the lattice has full rank.
  std::optional<std::int64_t> index() const;
  /// Integer basis of {x : M x = 0}, as columns.
  std::vector<IVector> kernel() const;
  /// Canonical coset representative: pivot rows reduced into [0, pivot).
  /// Returns (reduced, c) with v - M c = reduced.
  std::pair<IVector, IVector> reduce(const IVector& v) const;
  bool contains(const IVector& v) const;
  /// Rows that carry no pivot: coordinates left free by the lattice.
  std::vector<std::size_t> free_rows() const;
};

ColumnHermite column_hermite(const IMatrix& M);

std::int64_t checked_add(std::int64_t a, std::int64_t b);
std::int64_t checked_mul(std::int64_t a, std::int64_t b);
std::int64_t floor_div(std::int64_t a, std::int64_t b);

}  // namespace nilspec
