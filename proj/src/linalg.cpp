#include "nilspec/linalg.hpp"

#include <stdexcept>
#include <utility>

namespace nilspec {

QVector zero_vector(std::size_t n) { return QVector(n); }

QVector unit_vector(std::size_t n, std::size_t i, Rational scale) {
  QVector v(n);
  v.at(i) = scale;
  return v;
}

bool is_zero(std::span<const Rational> v) {
  for (const auto& x : v) {
    if (!x.is_zero()) return false;
  }
  return true;
}

namespace {
void check_same(const QVector& a, const QVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("vector dimension mismatch");
}
}  // namespace

QVector operator+(const QVector& a, const QVector& b) {
  QVector r = a;
  return r += b;
}

QVector operator-(const QVector& a, const QVector& b) {
  QVector r = a;
  return r -= b;
}

QVector operator-(const QVector& a) {
  QVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
  return r;
}

QVector operator*(const Rational& s, const QVector& v) {
  QVector r(v.size());
  if (s.is_zero()) return r;
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = s * v[i];
  return r;
}

QVector& operator+=(QVector& a, const QVector& b) {
  check_same(a, b);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!b[i].is_zero()) a[i] += b[i];
  }
  return a;
}

QVector& operator-=(QVector& a, const QVector& b) {
  check_same(a, b);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!b[i].is_zero()) a[i] -= b[i];
  }
  return a;
}

void axpy(QVector& a, const Rational& s, const QVector& b) {
  check_same(a, b);
  if (s.is_zero()) return;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!b[i].is_zero()) a[i] += s * b[i];
  }
}

Rational dot(std::span<const Rational> a, std::span<const Rational> b) {
  if (a.size() != b.size()) throw std::invalid_argument("vector dimension mismatch");
  Rational s;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_zero() && !b[i].is_zero()) s += a[i] * b[i];
  }
  return s;
}

std::vector<double> to_double(std::span<const Rational> v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].to_double();
  return out;
}

QMatrix QMatrix::identity(std::size_t n) {
  QMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

QMatrix QMatrix::from_rows(const std::vector<QVector>& rows) {
  if (rows.empty()) return {};
  QMatrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols_) throw std::invalid_argument("ragged matrix rows");
    for (std::size_t c = 0; c < m.cols_; ++c) m(r, c) = rows[r][c];
  }
  return m;
}

QMatrix QMatrix::from_columns(const std::vector<QVector>& cols) {
  return from_rows(cols).transpose();
}

QVector QMatrix::row(std::size_t r) const {
  return QVector(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                 data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
}

QVector QMatrix::col(std::size_t c) const {
  QVector v(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
  return v;
}

std::vector<QVector> QMatrix::row_list() const {
  std::vector<QVector> out;
  out.reserve(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out.push_back(row(r));
  return out;
}

std::vector<QVector> QMatrix::column_list() const {
  std::vector<QVector> out;
  out.reserve(cols_);
  for (std::size_t c = 0; c < cols_; ++c) out.push_back(col(c));
  return out;
}

QMatrix QMatrix::transpose() const {
  QMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

QVector QMatrix::operator*(const QVector& v) const {
  if (v.size() != cols_) throw std::invalid_argument("matrix-vector dimension mismatch");
  QVector out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    Rational s;
    for (std::size_t c = 0; c < cols_; ++c) {
      const auto& a = (*this)(r, c);
      if (!a.is_zero() && !v[c].is_zero()) s += a * v[c];
    }
    out[r] = s;
  }
  return out;
}

QVector QMatrix::left_multiply(const QVector& v) const {
  if (v.size() != rows_) throw std::invalid_argument("vector-matrix dimension mismatch");
  QVector out(cols_);
  for (std::size_t r = 0; r < rows_; ++r) {
    if (v[r].is_zero()) continue;
    for (std::size_t c = 0; c < cols_; ++c) {
      const auto& a = (*this)(r, c);
      if (!a.is_zero()) out[c] += v[r] * a;
    }
  }
  return out;
}

QMatrix QMatrix::operator*(const QMatrix& m) const {
  if (cols_ != m.rows_) throw std::invalid_argument("matrix product dimension mismatch");
  QMatrix out(rows_, m.cols_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t k = 0; k < cols_; ++k) {
      const auto& a = (*this)(r, k);
      if (a.is_zero()) continue;
      for (std::size_t c = 0; c < m.cols_; ++c) {
        if (!m(k, c).is_zero()) out(r, c) += a * m(k, c);
      }
    }
  return out;
}

QMatrix QMatrix::operator-(const QMatrix& m) const {
  if (rows_ != m.rows_ || cols_ != m.cols_) throw std::invalid_argument("matrix shape mismatch");
  QMatrix out = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] -= m.data_[i];
  return out;
}

RowEchelon rref(QMatrix m) {
  RowEchelon out;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    std::size_t pivot = row;
    while (pivot < m.rows() && m(pivot, col).is_zero()) ++pivot;
    if (pivot == m.rows()) continue;
    if (pivot != row) {
      for (std::size_t c = 0; c < m.cols(); ++c) std::swap(m(pivot, c), m(row, c));
    }
    const Rational inv = Rational(1) / m(row, col);
    for (std::size_t c = col; c < m.cols(); ++c) m(row, c) *= inv;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (r == row || m(r, col).is_zero()) continue;
      const Rational f = m(r, col);
      for (std::size_t c = col; c < m.cols(); ++c) {
        if (!m(row, c).is_zero()) m(r, c) -= f * m(row, c);
      }
    }
    out.pivots.push_back(col);
    ++row;
  }
  out.reduced = std::move(m);
  return out;
}

std::size_t rank(const QMatrix& m) { return rref(m).rank(); }

std::vector<QVector> nullspace(const QMatrix& m) {
  const auto echelon = rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto p : echelon.pivots) is_pivot[p] = true;
  std::vector<QVector> basis;
  for (std::size_t free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    QVector v(m.cols());
    v[free] = 1;
    for (std::size_t r = 0; r < echelon.pivots.size(); ++r) {
      v[echelon.pivots[r]] = -echelon.reduced(r, free);
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

std::optional<QVector> solve(const QMatrix& m, const QVector& b) {
  if (b.size() != m.rows()) throw std::invalid_argument("solve: rhs dimension mismatch");
  QMatrix aug(m.rows(), m.cols() + 1);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) aug(r, c) = m(r, c);
    aug(r, m.cols()) = b[r];
  }
  const auto echelon = rref(std::move(aug));
  if (!echelon.pivots.empty() && echelon.pivots.back() == m.cols()) return std::nullopt;
  QVector x(m.cols());
  for (std::size_t r = 0; r < echelon.pivots.size(); ++r) {
    x[echelon.pivots[r]] = echelon.reduced(r, m.cols());
  }
  return x;
}

std::optional<QMatrix> inverse(const QMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("inverse of non-square matrix");
  const std::size_t n = m.rows();
  QMatrix aug(n, 2 * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) aug(r, c) = m(r, c);
    aug(r, n + r) = 1;
  }
  const auto echelon = rref(std::move(aug));
  if (echelon.rank() < n || echelon.pivots[n - 1] != n - 1) return std::nullopt;
  QMatrix inv(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) inv(r, c) = echelon.reduced(r, n + c);
  return inv;
}

Subspace Subspace::span(std::size_t ambient, const std::vector<QVector>& vectors) {
  Subspace s(ambient);
  if (vectors.empty()) return s;
  for (const auto& v : vectors) {
    if (v.size() != ambient) throw std::invalid_argument("subspace vector dimension mismatch");
  }
  const auto echelon = rref(QMatrix::from_rows(vectors));
  for (std::size_t r = 0; r < echelon.rank(); ++r) s.basis_.push_back(echelon.reduced.row(r));
  return s;
}

Subspace Subspace::whole(std::size_t ambient) {
  std::vector<QVector> e;
  for (std::size_t i = 0; i < ambient; ++i) e.push_back(unit_vector(ambient, i));
  return span(ambient, e);
}

bool Subspace::contains(const QVector& v) const {
  if (v.size() != ambient_) throw std::invalid_argument("subspace membership dimension mismatch");
  if (is_zero(v)) return true;
  auto rows = basis_;
  rows.push_back(v);
  return rank(QMatrix::from_rows(rows)) == basis_.size();
}

bool Subspace::contains(const Subspace& other) const {
  for (const auto& v : other.basis()) {
    if (!contains(v)) return false;
  }
  return true;
}

}  // namespace nilspec
