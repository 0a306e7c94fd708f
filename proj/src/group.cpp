#include "nilspec/group.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <random>
#include <sstream>
#include <stdexcept>

namespace nilspec {

namespace {

void require_supported(const LieAlgebra& L) {
  if (L.step() < 1 || L.step() > 3) throw std::domain_error("BCH product needs a nilpotent algebra of step <= 3");
}

DVector& add_scaled(DVector& a, double s, const DVector& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += s * b[i];
  return a;
}

}  // namespace

QVector bch_product(const LieAlgebra& L, const QVector& x, const QVector& y) {
  require_supported(L);
  QVector out = x + y;
  if (L.step() == 1) return out;
  const QVector xy = L.bracket(x, y);
  axpy(out, Rational(1, 2), xy);
  if (L.step() == 3) {
    axpy(out, Rational(1, 12), L.bracket(x, xy));
    axpy(out, Rational(-1, 12), L.bracket(y, xy));
  }
  return out;
}

DVector bch_product(const LieAlgebra& L, const DVector& x, const DVector& y) {
  require_supported(L);
  DVector out = x;
  add_scaled(out, 1.0, y);
  if (L.step() == 1) return out;
  const DVector xy = L.bracket(x, y);
  add_scaled(out, 0.5, xy);
  if (L.step() == 3) {
    add_scaled(out, 1.0 / 12.0, L.bracket(x, xy));
    add_scaled(out, -1.0 / 12.0, L.bracket(y, xy));
  }
  return out;
}

QVector group_inverse(const QVector& x) { return -x; }

DVector group_inverse(const DVector& x) {
  DVector r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = -x[i];
  return r;
}

QVector conjugate(const LieAlgebra& L, const QVector& a, const QVector& x) {
  require_supported(L);
  // exp(ad A) X, which terminates after ad^2 for step <= 3.
  const QVector ax = L.bracket(a, x);
  QVector out = x + ax;
  axpy(out, Rational(1, 2), L.bracket(a, ax));
  return out;
}

DVector conjugate(const LieAlgebra& L, const DVector& a, const DVector& x) {
  require_supported(L);
  const DVector ax = L.bracket(a, x);
  DVector out = x;
  add_scaled(out, 1.0, ax);
  add_scaled(out, 0.5, L.bracket(a, ax));
  return out;
}

QVector group_commutator(const LieAlgebra& L, const QVector& a, const QVector& x) {
  return bch_product(L, conjugate(L, a, x), group_inverse(x));
}

std::optional<QVector> is_conjugate_in_G(const LieAlgebra& L, const QVector& x, const QVector& y) {
  require_supported(L);
  const std::size_t n = L.dim();
  const QVector D = y - x;
  if (L.step() == 1) return is_zero(D) ? std::optional<QVector>(QVector(n)) : std::nullopt;
  const auto g2 = L.filtration().term(2).basis();
  const std::size_t w = g2.size();

  // [A0, X] = D mod g^(2), i.e. -ad(X) A0 - sum c_t w_t = D.
  const QMatrix adx = L.ad(x);
  QMatrix sys(n, n + w);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) sys(r, c) = -adx(r, c);
    for (std::size_t t = 0; t < w; ++t) sys(r, n + t) = -g2[t][r];
  }
  const auto first = solve(sys, D);
  if (!first) return std::nullopt;
  const QVector A0(first->begin(), first->begin() + static_cast<std::ptrdiff_t>(n));

  const QVector a0x = L.bracket(A0, x);
  QVector R = D - a0x;
  axpy(R, Rational(-1, 2), L.bracket(A0, a0x));

  // B ranges over {B : [B, X] in g^(2)}; solve [B,X] + 1/2 [B,[A0,X]] = R there.
  std::vector<QVector> S;
  for (const auto& v : nullspace(sys)) S.emplace_back(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n));
  QVector A = A0;
  if (!is_zero(R)) {
    if (S.empty()) return std::nullopt;
    QMatrix second(n, S.size());
    for (std::size_t s = 0; s < S.size(); ++s) {
      QVector col = L.bracket(S[s], x);
      axpy(col, Rational(1, 2), L.bracket(S[s], a0x));
      for (std::size_t r = 0; r < n; ++r) second(r, s) = col[r];
    }
    const auto beta = solve(second, R);
    if (!beta) return std::nullopt;
    for (std::size_t s = 0; s < S.size(); ++s) axpy(A, (*beta)[s], S[s]);
  }
  if (conjugate(L, A, x) != y) throw std::logic_error("conjugacy solve produced a wrong witness");
  return A;
}

std::optional<DVector> is_conjugate_in_G(const LieAlgebra& L, const DVector& x, const DVector& y, double tol) {
  require_supported(L);
  const std::size_t n = L.dim();
  Eigen::VectorXd D(n);
  for (std::size_t i = 0; i < n; ++i) D[i] = y[i] - x[i];
  if (L.step() == 1) {
    if (D.norm() > tol) return std::nullopt;
    return DVector(n, 0.0);
  }
  const auto g2 = L.filtration().term(2).basis();
  const std::size_t w = g2.size();
  Eigen::MatrixXd sys(n, n + w);
  for (std::size_t j = 0; j < n; ++j) {
    DVector e(n, 0.0);
    e[j] = 1.0;
    const auto col = L.bracket(x, e);
    for (std::size_t r = 0; r < n; ++r) sys(r, j) = -col[r];
  }
  for (std::size_t t = 0; t < w; ++t)
    for (std::size_t r = 0; r < n; ++r) sys(r, n + t) = -g2[t][r].to_double();

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
  cod.setThreshold(1e-10);
  cod.compute(sys);
  const Eigen::VectorXd sol = cod.solve(D);
  if ((sys * sol - D).norm() > tol) return std::nullopt;
  DVector A0(sol.data(), sol.data() + n);

  const DVector a0x = L.bracket(A0, x);
  Eigen::VectorXd R = D;
  const DVector a0a0x = L.bracket(A0, a0x);
  for (std::size_t i = 0; i < n; ++i) R[i] -= a0x[i] + 0.5 * a0a0x[i];

  DVector A = A0;
  if (R.norm() > tol) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    std::vector<DVector> S;
    for (Eigen::Index c = 0; c < svd.matrixV().cols(); ++c) {
      const double s = c < sv.size() ? sv[c] : 0.0;
      if (s > 1e-10) continue;
      DVector b(n);
      for (std::size_t i = 0; i < n; ++i) b[i] = svd.matrixV()(static_cast<Eigen::Index>(i), c);
      S.push_back(std::move(b));
    }
    if (S.empty()) return std::nullopt;
    Eigen::MatrixXd second(n, S.size());
    for (std::size_t s = 0; s < S.size(); ++s) {
      DVector col = L.bracket(S[s], x);
      add_scaled(col, 0.5, L.bracket(S[s], a0x));
      for (std::size_t r = 0; r < n; ++r) second(r, s) = col[r];
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod2;
    cod2.setThreshold(1e-10);
    cod2.compute(second);
    const Eigen::VectorXd beta = cod2.solve(R);
    if ((second * beta - R).norm() > tol) return std::nullopt;
    for (std::size_t s = 0; s < S.size(); ++s) add_scaled(A, beta[s], S[s]);
  }
  const auto check = conjugate(L, A, x);
  double err = 0.0;
  for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(check[i] - y[i]));
  if (err > tol) return std::nullopt;
  return A;
}

// ---------------------------------------------------------------- lattices

Lattice::Lattice(std::shared_ptr<const LieAlgebra> algebra, std::vector<QVector> generators,
                 std::vector<std::string> names)
    : algebra_(std::move(algebra)), generators_(std::move(generators)), names_(std::move(names)) {
  const auto& L = *algebra_;
  require_supported(L);
  const std::size_t n = L.dim();
  if (generators_.size() != n) throw std::invalid_argument("lattice needs exactly dim generators");
  if (names_.empty())
    for (std::size_t i = 0; i < n; ++i) names_.push_back("g" + std::to_string(i + 1));
  if (names_.size() != n) throw std::invalid_argument("lattice generator names do not match");
  filtration_ = L.filtration();

  const int s = filtration_.step;
  std::vector<std::size_t> depth(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (generators_[i].size() != n) throw std::invalid_argument("lattice generator has wrong dimension");
    if (is_zero(generators_[i])) throw std::invalid_argument("lattice generator is zero");
    int d = 0;
    while (d + 1 < s && filtration_.term(d + 1).contains(generators_[i])) ++d;
    depth[i] = static_cast<std::size_t>(d);
    if (i > 0 && depth[i] < depth[i - 1]) throw std::invalid_argument("lattice generators must be sorted by depth");
  }
  layer_start_.assign(static_cast<std::size_t>(s) + 1, n);
  for (std::size_t d = 0; d <= static_cast<std::size_t>(s); ++d) {
    std::size_t i = 0;
    while (i < n && depth[i] < d) ++i;
    layer_start_[d] = i;
  }
  for (std::size_t d = 0; d < static_cast<std::size_t>(s); ++d) {
    const auto here = filtration_.term(static_cast<int>(d));
    const auto below = filtration_.term(static_cast<int>(d) + 1);
    if (layer_size(d) != here.dim() - below.dim())
      throw std::invalid_argument("lattice layer " + std::to_string(d) + " has the wrong number of generators");
  }
  auto inv = inverse(QMatrix::from_columns(generators_));
  if (!inv) throw std::invalid_argument("lattice generators are linearly dependent");
  ginv_ = std::move(*inv);
}

QVector Lattice::word_to_element(std::span<const std::int64_t> exponents) const {
  if (exponents.size() != rank()) throw std::invalid_argument("word length does not match generator count");
  const auto& L = *algebra_;
  QVector acc(L.dim());
  for (std::size_t i = 0; i < rank(); ++i) {
    if (exponents[i] == 0) continue;
    acc = bch_product(L, acc, Rational(exponents[i]) * generators_[i]);
  }
  return acc;
}

std::optional<IVector> Lattice::coordinates(const QVector& x) const {
  const auto& L = *algebra_;
  if (x.size() != L.dim()) throw std::invalid_argument("coordinates: dimension mismatch");
  IVector out(rank(), 0);
  QVector r = x;
  for (std::size_t d = 0; d < layers(); ++d) {
    if (is_zero(r)) break;
    const QVector c = ginv_ * r;
    const auto [b, e] = layer(d);
    for (std::size_t i = 0; i < b; ++i)
      if (!c[i].is_zero()) return std::nullopt;
    QVector word(L.dim());
    for (std::size_t i = b; i < e; ++i) {
      if (!c[i].is_integer()) return std::nullopt;
      out[i] = c[i].num();
      if (out[i] != 0) word = bch_product(L, word, c[i] * generators_[i]);
    }
    r = bch_product(L, group_inverse(word), r);
  }
  if (!is_zero(r)) return std::nullopt;
  return out;
}

LatticeReport Lattice::validate(int window) const {
  LatticeReport rep;
  const auto& L = *algebra_;
  for (std::size_t d = 0; d < layers(); ++d) {
    std::vector<QVector> vs = filtration_.term(static_cast<int>(d) + 1).basis();
    const auto [b, e] = layer(d);
    for (std::size_t i = b; i < e; ++i) vs.push_back(generators_[i]);
    if (Subspace::span(L.dim(), vs).dim() != filtration_.term(static_cast<int>(d)).dim())
      rep.fail("layer " + std::to_string(d) + " does not span its filtration quotient");
  }
  for (std::size_t a = 0; a < rank(); ++a)
    for (std::size_t b = 0; b < rank(); ++b)
      for (int sgn : {1, -1}) {
        const auto c = conjugate(L, Rational(sgn) * generators_[a], generators_[b]);
        if (!coordinates(c))
          rep.fail("conjugate of " + names_[b] + " by " + names_[a] + (sgn < 0 ? "^-1" : "") + " is not in the lattice");
      }
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> dist(-window, window);
  std::vector<IVector> words;
  for (int t = 0; t < 24; ++t) {
    IVector w(rank());
    for (auto& v : w) v = dist(rng);
    words.push_back(std::move(w));
  }
  for (std::size_t a = 0; a < words.size(); ++a)
    for (std::size_t b = 0; b < words.size(); b += 3) {
      const auto p = bch_product(L, word_to_element(words[a]), word_to_element(words[b]));
      const auto c = coordinates(p);
      if (!c || word_to_element(*c) != p) {
        rep.fail("product of window words is not in canonical form");
        return rep;
      }
    }
  for (const auto& w : words) {
    const auto c = coordinates(word_to_element(w));
    if (!c || *c != w) {
      rep.fail("canonical coordinates do not round-trip");
      return rep;
    }
  }
  return rep;
}

std::vector<IVector> Lattice::central_basis() const {
  const auto& L = *algebra_;
  const auto last = layer(layers() - 1);
  std::vector<QVector> span;
  for (std::size_t i = last.first; i < last.second; ++i) span.push_back(generators_[i]);
  if (Subspace::span(L.dim(), span) != filtration_.center)
    throw std::domain_error("center is not spanned by the deepest lattice layer");
  std::vector<IVector> out;
  for (std::size_t i = last.first; i < last.second; ++i) {
    IVector e(rank(), 0);
    e[i] = 1;
    out.push_back(std::move(e));
  }
  return out;
}

// ---------------------------------------------------------------- class invariant

namespace {

IVector slice(const IVector& v, std::pair<std::size_t, std::size_t> r) {
  return IVector(v.begin() + static_cast<std::ptrdiff_t>(r.first), v.begin() + static_cast<std::ptrdiff_t>(r.second));
}

IVector embed(std::size_t n, std::pair<std::size_t, std::size_t> r, const IVector& part) {
  IVector out(n, 0);
  for (std::size_t i = r.first; i < r.second; ++i) out[i] = part[i - r.first];
  return out;
}

IVector difference(const IVector& a, const IVector& b) {
  IVector d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = checked_add(a[i], -b[i]);
  return d;
}

}  // namespace

IVector ClassInvariant::conjugate_coords(const IVector& a, const IVector& gamma) const {
  const auto& lat = *lat_;
  const auto c = lat.coordinates(conjugate(lat.algebra(), lat.word_to_element(a), lat.word_to_element(gamma)));
  if (!c) throw std::logic_error("conjugate of lattice elements left the lattice");
  return *c;
}

ColumnHermite ClassInvariant::middle_lattice(const IVector& gamma) const {
  const auto& lat = *lat_;
  const auto top = lat.layer(0);
  const auto mid = lat.layer(1);
  std::vector<IVector> cols;
  for (std::size_t i = top.first; i < top.second; ++i) {
    IVector a(lat.rank(), 0);
    a[i] = 1;
    const auto img = conjugate_coords(a, gamma);
    cols.push_back(difference(slice(img, mid), slice(gamma, mid)));
  }
  return column_hermite(IMatrix::from_columns(mid.second - mid.first, cols));
}

ColumnHermite ClassInvariant::bottom_lattice(const IVector& gamma) const {
  const auto& lat = *lat_;
  const auto top = lat.layer(0);
  const auto mid = lat.layer(1);
  const auto bot = lat.layer(2);
  const auto tau = middle_lattice(gamma);
  std::vector<IVector> stab;
  for (const auto& k : tau.kernel()) stab.push_back(embed(lat.rank(), top, k));
  for (std::size_t i = mid.first; i < mid.second; ++i) {
    IVector a(lat.rank(), 0);
    a[i] = 1;
    stab.push_back(std::move(a));
  }
  std::vector<IVector> cols;
  for (const auto& a : stab) {
    const auto img = conjugate_coords(a, gamma);
    if (slice(img, top) != slice(gamma, top) || slice(img, mid) != slice(gamma, mid))
      throw std::logic_error("stabilizer element moved the middle coordinates");
    cols.push_back(difference(slice(img, bot), slice(gamma, bot)));
  }
  return column_hermite(IMatrix::from_columns(bot.second - bot.first, cols));
}

ClassData ClassInvariant::classify(const IVector& gamma) const {
  const auto& lat = *lat_;
  const auto& L = lat.algebra();
  if (gamma.size() != lat.rank()) throw std::invalid_argument("classify: wrong tuple length");
  ClassData out;
  out.representative = gamma;
  out.conjugator = IVector(lat.rank(), 0);
  out.middle_index = 1;
  out.bottom_index = 1;
  if (lat.layers() < 2) return out;

  const auto top = lat.layer(0);
  const auto mid = lat.layer(1);
  const auto tau = middle_lattice(gamma);
  out.middle_index = tau.index();
  const auto [kred, coef] = tau.reduce(slice(gamma, mid));
  IVector u(lat.rank(), 0);
  for (std::size_t i = top.first; i < top.second; ++i) u[i] = -coef[i - top.first];
  IVector g1 = conjugate_coords(u, gamma);
  if (slice(g1, mid) != kred) throw std::logic_error("middle reduction conjugator missed its target");
  QVector conj = lat.word_to_element(u);

  if (lat.layers() >= 3) {
    const auto bot = lat.layer(2);
    const auto phi = bottom_lattice(g1);
    out.bottom_index = phi.index();
    const auto [jred, c2] = phi.reduce(slice(g1, bot));
    // Rebuild the stabilizer words in the same order as bottom_lattice.
    std::vector<IVector> stab;
    for (const auto& k : middle_lattice(g1).kernel()) stab.push_back(embed(lat.rank(), top, k));
    for (std::size_t i = mid.first; i < mid.second; ++i) {
      IVector a(lat.rank(), 0);
      a[i] = 1;
      stab.push_back(std::move(a));
    }
    QVector a2(L.dim());
    for (std::size_t s = 0; s < stab.size(); ++s) {
      if (c2[s] == 0) continue;
      a2 = bch_product(L, a2, Rational(-c2[s]) * lat.word_to_element(stab[s]));
    }
    const auto g2 = lat.coordinates(conjugate(L, a2, lat.word_to_element(g1)));
    if (!g2 || slice(*g2, bot) != jred) throw std::logic_error("bottom reduction conjugator missed its target");
    g1 = *g2;
    conj = bch_product(L, a2, conj);
  }
  out.representative = g1;
  const auto cw = lat.coordinates(conj);
  if (!cw) throw std::logic_error("class conjugator is not a lattice element");
  out.conjugator = *cw;
  return out;
}

// ---------------------------------------------------------------- windows and enumeration

bool Window::contains(const IVector& e) const {
  if (e.size() != bound.size()) return false;
  for (std::size_t i = 0; i < e.size(); ++i)
    if (e[i] < -bound[i] || e[i] > bound[i]) return false;
  return true;
}

std::size_t Window::size() const {
  std::size_t s = 1;
  for (auto b : bound) s *= static_cast<std::size_t>(2 * b + 1);
  return s;
}

Window Window::doubled() const {
  Window w = *this;
  for (auto& b : w.bound) b = std::max<std::int64_t>(1, 2 * b);
  return w;
}

void Window::for_each(const std::function<void(const IVector&)>& f) const {
  IVector e(bound.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = -bound[i];
  while (true) {
    f(e);
    std::size_t i = e.size();
    while (i > 0) {
      --i;
      if (e[i] < bound[i]) {
        ++e[i];
        break;
      }
      e[i] = -bound[i];
      if (i == 0) return;
    }
    if (e.empty()) return;
  }
}

std::vector<ConjugacyClass> partition_classes(const Lattice& lat, const std::vector<IVector>& candidates,
                                              const Window& explore) {
  const auto& L = lat.algebra();
  std::map<IVector, std::size_t> id;
  std::vector<std::size_t> parent;
  std::vector<IVector> elems;
  const auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  const auto intern = [&](const IVector& e) -> std::pair<std::size_t, bool> {
    auto [it, fresh] = id.emplace(e, elems.size());
    if (fresh) {
      parent.push_back(elems.size());
      elems.push_back(e);
    }
    return {it->second, fresh};
  };
  std::vector<QVector> gens;
  for (std::size_t i = 0; i < lat.rank(); ++i) {
    gens.push_back(lat.generators()[i]);
    gens.push_back(-lat.generators()[i]);
  }
  std::queue<std::size_t> todo;
  for (const auto& c : candidates) {
    auto [i, fresh] = intern(c);
    if (fresh) todo.push(i);
  }
  while (!todo.empty()) {
    const std::size_t cur = todo.front();
    todo.pop();
    const QVector x = lat.word_to_element(elems[cur]);
    for (const auto& g : gens) {
      const auto y = lat.coordinates(conjugate(L, g, x));
      if (!y) throw std::logic_error("generator conjugate left the lattice");
      if (!explore.contains(*y)) continue;
      auto [j, fresh] = intern(*y);
      const auto a = find(cur), b = find(j);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
      if (fresh) todo.push(j);
    }
  }
  std::map<std::size_t, ConjugacyClass> by_root;
  std::vector<IVector> sorted = candidates;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (const auto& c : sorted) {
    auto& cls = by_root[find(id.at(c))];
    if (cls.size_in_window == 0) cls.representative = c;
    ++cls.size_in_window;
  }
  std::vector<ConjugacyClass> out;
  for (auto& [root, cls] : by_root) out.push_back(std::move(cls));
  std::sort(out.begin(), out.end(),
            [](const ConjugacyClass& a, const ConjugacyClass& b) { return a.representative < b.representative; });
  return out;
}

Enumeration enumerate_classes(const Lattice& lat, const std::function<std::vector<IVector>(int)>& candidates,
                              const std::function<Window(int)>& explore, int scale) {
  Enumeration e;
  e.window = explore(scale);
  e.classes = partition_classes(lat, candidates(scale), e.window);
  const auto wider = partition_classes(lat, candidates(2 * scale), explore(2 * scale));
  e.certified = wider.size() == e.classes.size();
  return e;
}

Enumeration enumerate_classes(const Lattice& lat, const Window& window, const Predicate& pred, std::int64_t margin) {
  const auto scaled = [&](int s) {
    Window w = window;
    for (auto& b : w.bound) b *= s;
    return w;
  };
  const auto cands = [&](int s) {
    std::vector<IVector> out;
    scaled(s).for_each([&](const IVector& e) {
      if (pred(e)) out.push_back(e);
    });
    return out;
  };
  const auto explore = [&](int s) {
    Window w = scaled(s);
    for (auto& b : w.bound) b = 2 * b + margin;
    return w;
  };
  return enumerate_classes(lat, cands, explore, 1);
}

std::string classes_csv(const std::vector<ConjugacyClass>& classes, const std::string& tag) {
  std::ostringstream os;
  os << "representative,class_size,predicate\n";
  for (const auto& c : classes) {
    for (std::size_t i = 0; i < c.representative.size(); ++i) os << (i ? ";" : "") << c.representative[i];
    os << ',' << c.size_in_window << ',' << tag << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------- conjugacy in the lattice

LatticeConjugacy is_conjugate_in_lattice(const Lattice& lat, const IVector& a, const IVector& b, std::int64_t window,
                                         const std::vector<ClosedForm>& closed_forms) {
  const auto& L = lat.algebra();
  LatticeConjugacy out;
  const ClassInvariant inv(lat);
  const auto ca = inv.classify(a);
  const auto cb = inv.classify(b);
  out.conjugate = ca.representative == cb.representative;
  const QVector xa = lat.word_to_element(a);
  const QVector xb = lat.word_to_element(b);
  if (out.conjugate) {
    const QVector w = bch_product(L, group_inverse(lat.word_to_element(cb.conjugator)), lat.word_to_element(ca.conjugator));
    if (conjugate(L, w, xa) != xb) throw std::logic_error("class invariant witness does not conjugate");
    out.witness = lat.coordinates(w);
  }

  Window::uniform(lat.rank(), window).for_each([&](const IVector& e) {
    if (out.brute_force_found) return;
    if (conjugate(L, lat.word_to_element(e), xa) == xb) {
      out.brute_force_found = true;
      if (!out.witness) out.witness = e;
    }
  });
  if (out.brute_force_found && !out.conjugate)
    throw std::logic_error("brute-force witness contradicts the class invariant");

  for (const auto& cf : closed_forms) {
    bool applicable = false, found = false;
    Window::uniform(cf.params, 2 * window + 1).for_each([&](const IVector& p) {
      if (found) return;
      const auto img = cf.apply(a, p);
      if (!img) return;
      applicable = true;
      if (*img == b) found = true;
    });
    if (!applicable) continue;
    if (found && !out.conjugate) throw std::logic_error("closed form " + cf.name + " claims a false conjugacy");
    if (out.brute_force_found && !found)
      throw std::logic_error("closed form " + cf.name + " misses a brute-force witness");
    if (found || !out.conjugate) out.closed_form_agrees = true;
  }
  return out;
}

}  // namespace nilspec
