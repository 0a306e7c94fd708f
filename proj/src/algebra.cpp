#include "nilspec/algebra.hpp"

#include <random>
#include <stdexcept>

namespace nilspec {

LieAlgebra LieAlgebra::from_brackets(std::vector<std::string> labels, const std::vector<BracketTerm>& terms,
                                     int declared_step) {
  LieAlgebra L;
  L.labels_ = std::move(labels);
  L.declared_step_ = declared_step;
  const std::size_t n = L.dim();
  L.c_.assign(n * n * n, Rational());
  for (const auto& t : terms) {
    if (t.i >= n || t.j >= n || t.k >= n) throw std::out_of_range("bracket index out of range");
    if (t.i == t.j) {
      if (!t.value.is_zero()) throw std::invalid_argument("nonzero self-bracket");
      continue;
    }
    L.c_[(t.i * n + t.j) * n + t.k] = t.value;
    L.c_[(t.j * n + t.i) * n + t.k] = -t.value;
  }
  L.index_terms();
  return L;
}

LieAlgebra LieAlgebra::from_tensor(std::vector<std::string> labels,
                                   std::vector<std::vector<std::vector<Rational>>> c, int declared_step) {
  LieAlgebra L;
  L.labels_ = std::move(labels);
  L.declared_step_ = declared_step;
  const std::size_t n = L.dim();
  if (c.size() != n) throw std::invalid_argument("structure tensor has wrong shape");
  L.c_.assign(n * n * n, Rational());
  for (std::size_t i = 0; i < n; ++i) {
    if (c[i].size() != n) throw std::invalid_argument("structure tensor has wrong shape");
    for (std::size_t j = 0; j < n; ++j) {
      if (c[i][j].size() != n) throw std::invalid_argument("structure tensor has wrong shape");
      for (std::size_t k = 0; k < n; ++k) L.c_[(i * n + j) * n + k] = c[i][j][k];
    }
  }
  L.index_terms();
  return L;
}

void LieAlgebra::index_terms() {
  const std::size_t n = dim();
  terms_.clear();
  dterms_.clear();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        const auto& v = c_[(i * n + j) * n + k];
        if (v.is_zero()) continue;
        terms_.push_back({i, j, k, v});
        dterms_.push_back(v.to_double());
      }
  filtration_ = derived_series(*this);
}

QVector LieAlgebra::bracket(const QVector& x, const QVector& y) const {
  if (x.size() != dim() || y.size() != dim()) throw std::invalid_argument("bracket: dimension mismatch");
  QVector out(dim());
  for (const auto& t : terms_) {
    if (x[t.i].is_zero() || y[t.j].is_zero()) continue;
    out[t.k] += t.value * x[t.i] * y[t.j];
  }
  return out;
}

std::vector<double> LieAlgebra::bracket(const std::vector<double>& x, const std::vector<double>& y) const {
  if (x.size() != dim() || y.size() != dim()) throw std::invalid_argument("bracket: dimension mismatch");
  std::vector<double> out(dim(), 0.0);
  for (std::size_t a = 0; a < terms_.size(); ++a) {
    const auto& t = terms_[a];
    out[t.k] += dterms_[a] * x[t.i] * y[t.j];
  }
  return out;
}

QMatrix LieAlgebra::ad(const QVector& x) const {
  QMatrix m(dim(), dim());
  for (const auto& t : terms_) {
    if (!x[t.i].is_zero()) m(t.k, t.j) += t.value * x[t.i];
  }
  return m;
}

std::optional<std::size_t> LieAlgebra::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] == label) return i;
  return std::nullopt;
}

QVector bracket(const QVector& x, const QVector& y, const LieAlgebra& L) { return L.bracket(x, y); }

StructureReport check_structure(const LieAlgebra& L) {
  StructureReport rep;
  const std::size_t n = L.dim();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        if (L.constant(i, j, k) != -L.constant(j, i, k)) rep.antisymmetry.push_back({i, j, k});
      }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) {
        const auto bi = L.basis_vector(i), bj = L.basis_vector(j), bk = L.basis_vector(k);
        auto jac = L.bracket(bi, L.bracket(bj, bk));
        jac += L.bracket(bj, L.bracket(bk, bi));
        jac += L.bracket(bk, L.bracket(bi, bj));
        if (!is_zero(jac)) rep.jacobi.push_back({i, j, k});
      }
  if (L.declared_step() != 0 && L.declared_step() != L.step()) rep.step_mismatch = true;
  return rep;
}

Subspace Filtration::term(int k) const {
  const std::size_t n = center.ambient();
  if (k <= 0) return Subspace::whole(n);
  if (static_cast<std::size_t>(k - 1) < derived.size()) return derived[k - 1];
  return Subspace(n);
}

Filtration derived_series(const LieAlgebra& L) {
  const std::size_t n = L.dim();
  Filtration f;
  f.center = Subspace(n);

  QMatrix stacked(n * n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto m = L.ad(L.basis_vector(i));
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) stacked(i * n + r, c) = m(r, c);
  }
  f.center = Subspace::span(n, nullspace(stacked));

  Subspace current = Subspace::whole(n);
  while (true) {
    std::vector<QVector> images;
    for (std::size_t i = 0; i < n; ++i)
      for (const auto& v : current.basis()) {
        auto b = L.bracket(L.basis_vector(i), v);
        if (!is_zero(b)) images.push_back(std::move(b));
      }
    Subspace next = Subspace::span(n, images);
    if (next.dim() == 0) {
      f.step = static_cast<int>(f.derived.size()) + 1;
      break;
    }
    if (next.dim() == current.dim()) {
      f.step = -1;  // not nilpotent
      break;
    }
    f.derived.push_back(next);
    current = std::move(next);
  }
  return f;
}

bool derived_series_compatible(const LieAlgebra& L, const Filtration& f) {
  const int last = static_cast<int>(f.derived.size());
  for (int k = 0; k <= last; ++k) {
    const auto here = f.term(k);
    const auto next = f.term(k + 1);
    if (!here.contains(next)) return false;
    for (std::size_t i = 0; i < L.dim(); ++i)
      for (const auto& v : here.basis())
        if (!next.contains(L.bracket(L.basis_vector(i), v))) return false;
  }
  return true;
}

Metric::Metric(QMatrix frame) : frame_(std::move(frame)) {
  if (frame_.rows() != frame_.cols()) throw std::invalid_argument("metric frame must be square");
  auto inv = inverse(frame_);
  if (!inv) throw std::invalid_argument("metric frame is singular");
  inverse_ = std::move(*inv);
}

Metric Metric::identity(std::size_t n) { return Metric(QMatrix::identity(n)); }

Rational Metric::inner(const QVector& u, const QVector& v) const {
  return dot(frame_coords(u), frame_coords(v));
}

QMatrix Metric::gram() const {
  const std::size_t n = dim();
  QMatrix g(n, n);
  std::vector<QVector> coords;
  for (std::size_t i = 0; i < n; ++i) coords.push_back(inverse_.row(i));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g(i, j) = dot(coords[i], coords[j]);
  return g;
}

Subspace orthogonal_complement(const Subspace& sub, const Subspace& within, const Metric& m) {
  const std::size_t n = within.ambient();
  if (within.dim() == 0) return Subspace(n);
  if (sub.dim() == 0) return within;
  QMatrix constraints(sub.dim(), within.dim());
  for (std::size_t r = 0; r < sub.dim(); ++r)
    for (std::size_t c = 0; c < within.dim(); ++c)
      constraints(r, c) = m.inner(sub.basis()[r], within.basis()[c]);
  std::vector<QVector> out;
  for (const auto& coeffs : nullspace(constraints)) {
    QVector v(n);
    for (std::size_t c = 0; c < within.dim(); ++c) axpy(v, coeffs[c], within.basis()[c]);
    out.push_back(std::move(v));
  }
  return Subspace::span(n, out);
}

QVector orthogonal_projection(const QVector& v, const Subspace& sub, const Metric& m) {
  const std::size_t d = sub.dim();
  QVector out(v.size());
  if (d == 0) return out;
  QMatrix g(d, d);
  QVector rhs(d);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) g(a, b) = m.inner(sub.basis()[a], sub.basis()[b]);
    rhs[a] = m.inner(sub.basis()[a], v);
  }
  const auto coeffs = solve(g, rhs);
  if (!coeffs) throw std::domain_error("metric is degenerate on subspace");
  for (std::size_t a = 0; a < d; ++a) axpy(out, (*coeffs)[a], sub.basis()[a]);
  return out;
}

std::vector<QVector> orthonormal_basis(const Subspace& sub, const Metric& m) {
  // Candidates are the projections of the declared frame vectors, so a subspace
  // spanned by frame vectors gets those vectors back.
  std::vector<QVector> out;
  for (std::size_t i = 0; i < m.dim() && out.size() < sub.dim(); ++i) {
    QVector v = orthogonal_projection(m.frame().row(i), sub, m);
    for (const auto& e : out) axpy(v, -m.inner(e, v), e);
    if (is_zero(v)) continue;
    const auto len = exact_sqrt(m.norm2(v));
    if (!len) throw std::domain_error("orthonormal basis needs an irrational normalization");
    out.push_back(Rational(1) / *len * v);
  }
  if (out.size() != sub.dim()) throw std::logic_error("orthonormal basis: frame does not span subspace");
  return out;
}

QMatrix AdaptedFrame::frame_matrix() const {
  std::vector<QVector> rows = X;
  rows.insert(rows.end(), Z.begin(), Z.end());
  rows.insert(rows.end(), W.begin(), W.end());
  return QMatrix::from_rows(rows);
}

QVector AdaptedFrame::to_frame(const QVector& v) const { return inverse_frame.left_multiply(v); }

QVector AdaptedFrame::from_frame(const QVector& a) const { return frame_matrix().left_multiply(a); }

AdaptedFrame adapted_frame(const LieAlgebra& L, const Metric& m) {
  const std::size_t n = L.dim();
  const auto filt = derived_series(L);
  if (!filt.nilpotent() || filt.step > 3) throw std::invalid_argument("adapted frame needs step <= 3");
  const Subspace whole = Subspace::whole(n);
  const Subspace g1 = filt.term(1);
  const Subspace g2 = filt.term(2);

  AdaptedFrame F;
  F.W = orthonormal_basis(g2, m);
  F.Z = orthonormal_basis(orthogonal_complement(g2, g1, m), m);
  F.X = orthonormal_basis(orthogonal_complement(g1, whole, m), m);
  F.J = F.X.size();
  F.K = F.Z.size();
  F.T = F.W.size();

  auto inv = inverse(F.frame_matrix());
  if (!inv) throw std::logic_error("adapted frame is singular");
  F.inverse_frame = std::move(*inv);

  const auto E = F.frame_matrix().row_list();
  F.f.assign(n * n * n, Rational());
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      const auto coords = F.to_frame(L.bracket(E[a], E[b]));
      for (std::size_t c = 0; c < n; ++c) F.f[(a * n + b) * n + c] = coords[c];
    }
  const std::size_t J = F.J, K = F.K, T = F.T;
  F.A.assign(J * J * K, Rational());
  F.B.assign(J * J * T, Rational());
  F.C.assign(J * K * T, Rational());
  for (std::size_t i = 0; i < J; ++i)
    for (std::size_t j = 0; j < J; ++j) {
      for (std::size_t k = 0; k < K; ++k) F.A[(i * J + j) * K + k] = F.structure(i, j, J + k);
      for (std::size_t t = 0; t < T; ++t) F.B[(i * J + j) * T + t] = F.structure(i, j, J + K + t);
    }
  for (std::size_t i = 0; i < J; ++i)
    for (std::size_t k = 0; k < K; ++k)
      for (std::size_t t = 0; t < T; ++t) F.C[(i * K + k) * T + t] = F.structure(i, J + k, J + K + t);
  return F;
}

bool adapted_frame_consistent(const LieAlgebra& L, const Metric& m, const AdaptedFrame& F) {
  const std::size_t n = L.dim();
  if (F.dim() != n) return false;
  const auto E = F.frame_matrix().row_list();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (m.inner(E[a], E[b]) != Rational(a == b ? 1 : 0)) return false;

  const auto filt = derived_series(L);
  if (Subspace::span(n, F.W) != filt.term(2)) return false;
  auto zw = F.Z;
  zw.insert(zw.end(), F.W.begin(), F.W.end());
  if (Subspace::span(n, zw) != filt.term(1)) return false;

  const std::size_t J = F.J, K = F.K, T = F.T;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      // Brackets of X with X land in zeta + g^(2); every other bracket lands in g^(2).
      const std::size_t lo = (a < J && b < J) ? J : J + K;
      for (std::size_t c = 0; c < lo; ++c)
        if (!F.structure(a, b, c).is_zero()) return false;
      for (std::size_t c = 0; c < n; ++c)
        if (F.structure(a, b, c) != -F.structure(b, a, c)) return false;
    }
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t h = 0; h < K; ++h)
      for (std::size_t c = 0; c < n; ++c)
        if (!F.structure(J + k, J + h, c).is_zero()) return false;
  for (std::size_t i = 0; i < J; ++i)
    for (std::size_t j = 0; j < J; ++j)
      for (std::size_t l = 0; l < J; ++l)
        for (std::size_t t = 0; t < T; ++t) {
          Rational s;
          for (std::size_t k = 0; k < K; ++k)
            s += F.a(j, l, k) * F.c(i, k, t) + F.a(i, j, k) * F.c(l, k, t) + F.a(l, i, k) * F.c(j, k, t);
          if (!s.is_zero()) return false;
        }
  return true;
}

bool nonsingular_at(const LieAlgebra& L, const Filtration& f, const QVector& x) {
  const auto image = Subspace::span(L.dim(), L.ad(x).column_list());
  return image.contains(f.center);
}

NonsingularityResult is_strictly_nonsingular(const LieAlgebra& L, int trials, std::uint64_t seed) {
  const std::size_t n = L.dim();
  const auto f = derived_series(L);
  NonsingularityResult res;
  if (f.center.dim() == 0) {
    res.degenerate = true;
    return res;
  }
  if (f.center.dim() == n) {
    // Nothing is noncentral; treated as failing since the definition needs a non-abelian algebra.
    res.degenerate = true;
    res.verdict = NonsingularVerdict::proven_false;
    return res;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = L.basis_vector(i);
    if (f.center.contains(x)) continue;
    if (!nonsingular_at(L, f, x)) {
      res.verdict = NonsingularVerdict::proven_false;
      res.witness = x;
      return res;
    }
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> coeff(-4, 4);
  for (int t = 0; t < trials; ++t) {
    QVector x(n);
    for (auto& c : x) c = coeff(rng);
    if (f.center.contains(x)) continue;
    ++res.trials;
    if (!nonsingular_at(L, f, x)) {
      res.verdict = NonsingularVerdict::proven_false;
      res.witness = x;
      return res;
    }
  }
  return res;
}

Quotient quotient_algebra(const LieAlgebra& L, const Metric& m) {
  const std::size_t n = L.dim();
  const auto f = derived_series(L);
  if (!f.nilpotent() || f.step < 2) throw std::invalid_argument("quotient needs a nilpotent algebra of step >= 2");
  Quotient q;
  q.kernel = f.term(f.step - 1);

  std::vector<QVector> cols;
  Subspace acc = q.kernel;
  for (std::size_t i = 0; i < n; ++i) {
    const auto b = L.basis_vector(i);
    if (acc.contains(b)) continue;
    q.kept.push_back(i);
    cols.push_back(b);
    auto basis = acc.basis();
    basis.push_back(b);
    acc = Subspace::span(n, basis);
  }
  const std::size_t nbar = q.kept.size();
  auto full = cols;
  for (const auto& v : q.kernel.basis()) full.push_back(v);
  const auto inv = inverse(QMatrix::from_columns(full));
  if (!inv) throw std::logic_error("quotient basis is singular");
  q.proj = QMatrix(nbar, n);
  for (std::size_t r = 0; r < nbar; ++r)
    for (std::size_t c = 0; c < n; ++c) q.proj(r, c) = (*inv)(r, c);

  std::vector<std::string> labels;
  std::vector<BracketTerm> terms;
  for (std::size_t a = 0; a < nbar; ++a) {
    labels.push_back(L.labels()[q.kept[a]]);
    for (std::size_t b = a + 1; b < nbar; ++b) {
      const auto img = q.proj * L.bracket(cols[a], cols[b]);
      for (std::size_t k = 0; k < nbar; ++k)
        if (!img[k].is_zero()) terms.push_back({a, b, k, img[k]});
    }
  }
  q.algebra = LieAlgebra::from_brackets(std::move(labels), terms, f.step - 1);

  const auto horizontal = orthogonal_complement(q.kernel, Subspace::whole(n), m);
  const auto hbasis = orthonormal_basis(horizontal, m);
  std::vector<QVector> qframe;
  for (const auto& h : hbasis) qframe.push_back(q.proj * h);
  q.metric = Metric(QMatrix::from_rows(qframe));

  const auto hmat = QMatrix::from_columns(hbasis);  // n x nbar
  const auto pinv = inverse(q.proj * hmat);
  if (!pinv) throw std::logic_error("horizontal space does not project isomorphically");
  q.section = hmat * *pinv;
  return q;
}

}  // namespace nilspec
