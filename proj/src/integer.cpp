#include "nilspec/integer.hpp"

#include <cstdlib>
#include <stdexcept>

namespace nilspec {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("integer overflow");
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("integer overflow");
  return r;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

IMatrix IMatrix::identity(std::size_t n) {
  IMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

IMatrix IMatrix::from_columns(std::size_t rows, const std::vector<IVector>& cols) {
  IMatrix m(rows, cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (cols[c].size() != rows) throw std::invalid_argument("ragged integer columns");
    for (std::size_t r = 0; r < rows; ++r) m(r, c) = cols[c][r];
  }
  return m;
}

IVector IMatrix::col(std::size_t c) const {
  IVector v(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
  return v;
}

IVector IMatrix::operator*(const IVector& v) const {
  if (v.size() != cols_) throw std::invalid_argument("integer matrix-vector mismatch");
  IVector out(rows_, 0);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c)
      if ((*this)(r, c) != 0 && v[c] != 0) out[r] = checked_add(out[r], checked_mul((*this)(r, c), v[c]));
  return out;
}

namespace {

// col_a -= q * col_b on both the working matrix and the transform.
void col_axpy(IMatrix& A, IMatrix& U, std::size_t a, std::size_t b, std::int64_t q) {
  if (q == 0) return;
  for (std::size_t r = 0; r < A.rows(); ++r) A(r, a) = checked_add(A(r, a), -checked_mul(q, A(r, b)));
  for (std::size_t r = 0; r < U.rows(); ++r) U(r, a) = checked_add(U(r, a), -checked_mul(q, U(r, b)));
}

void col_swap(IMatrix& A, IMatrix& U, std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t r = 0; r < A.rows(); ++r) std::swap(A(r, a), A(r, b));
  for (std::size_t r = 0; r < U.rows(); ++r) std::swap(U(r, a), U(r, b));
}

void col_negate(IMatrix& A, IMatrix& U, std::size_t a) {
  for (std::size_t r = 0; r < A.rows(); ++r) A(r, a) = -A(r, a);
  for (std::size_t r = 0; r < U.rows(); ++r) U(r, a) = -U(r, a);
}

}  // namespace

ColumnHermite column_hermite(const IMatrix& M) {
  IMatrix A = M;
  IMatrix U = IMatrix::identity(M.cols());
  ColumnHermite out;
  out.source_cols = M.cols();
  std::size_t next = 0;
  for (std::size_t r = 0; r < A.rows() && next < A.cols(); ++r) {
    // Euclid across columns next.. until a single nonzero remains in row r.
    while (true) {
      std::size_t best = A.cols();
      for (std::size_t c = next; c < A.cols(); ++c) {
        if (A(r, c) == 0) continue;
        if (best == A.cols() || std::abs(A(r, c)) < std::abs(A(r, best))) best = c;
      }
      if (best == A.cols()) break;
      col_swap(A, U, next, best);
      bool done = true;
      for (std::size_t c = next + 1; c < A.cols(); ++c) {
        if (A(r, c) == 0) continue;
        col_axpy(A, U, c, next, A(r, c) / A(r, next));
        if (A(r, c) != 0) done = false;
      }
      if (done) break;
    }
    if (A(r, next) == 0) continue;
    if (A(r, next) < 0) col_negate(A, U, next);
    for (std::size_t c = 0; c < next; ++c) col_axpy(A, U, c, next, floor_div(A(r, c), A(r, next)));
    out.pivots.push_back(r);
    ++next;
  }
  out.H = IMatrix(A.rows(), out.rank());
  for (std::size_t r = 0; r < A.rows(); ++r)
    for (std::size_t c = 0; c < out.rank(); ++c) out.H(r, c) = A(r, c);
  out.U = std::move(U);
  return out;
}

std::optional<std::int64_t> ColumnHermite::index() const {
  if (!full_rank()) return std::nullopt;
  std::int64_t d = 1;
  for (std::size_t c = 0; c < rank(); ++c) d = checked_mul(d, H(pivots[c], c));
  return d;
}

std::vector<IVector> ColumnHermite::kernel() const {
  std::vector<IVector> out;
  for (std::size_t c = rank(); c < source_cols; ++c) out.push_back(U.col(c));
  return out;
}

std::pair<IVector, IVector> ColumnHermite::reduce(const IVector& v) const {
  if (v.size() != ambient()) throw std::invalid_argument("lattice reduction dimension mismatch");
  IVector red = v;
  IVector hcoef(rank(), 0);
  for (std::size_t c = 0; c < rank(); ++c) {
    const std::size_t p = pivots[c];
    const std::int64_t q = floor_div(red[p], H(p, c));
    if (q == 0) continue;
    hcoef[c] = q;
    for (std::size_t r = 0; r < ambient(); ++r) red[r] = checked_add(red[r], -checked_mul(q, H(r, c)));
  }
  IVector coef(source_cols, 0);
  for (std::size_t c = 0; c < rank(); ++c)
    if (hcoef[c] != 0)
      for (std::size_t r = 0; r < source_cols; ++r) coef[r] = checked_add(coef[r], checked_mul(U(r, c), hcoef[c]));
  return {red, coef};
}

bool ColumnHermite::contains(const IVector& v) const {
  const auto red = reduce(v).first;
  for (auto x : red)
    if (x != 0) return false;
  return true;
}

std::vector<std::size_t> ColumnHermite::free_rows() const {
  std::vector<std::size_t> out;
  std::size_t c = 0;
  for (std::size_t r = 0; r < ambient(); ++r) {
    if (c < rank() && pivots[c] == r) {
      ++c;
      continue;
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace nilspec
