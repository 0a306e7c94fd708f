#include "nilspec/spectra.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "nilspec/parallel.hpp"

namespace nilspec {

namespace {

std::string short_str(const Rational& r) {
  if (r.is_integer()) return std::to_string(r.num());
  return std::to_string(r.num()) + "/" + std::to_string(r.den());
}

}  // namespace

// ---------------------------------------------------------------- PiPoly

PiPoly PiPoly::pi() {
  PiPoly p;
  p.c_ = {Rational(0), Rational(1)};
  return p;
}

void PiPoly::trim() {
  while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
}

Rational PiPoly::rational() const {
  if (!is_rational()) throw std::domain_error("value involves pi: " + str());
  return c_.empty() ? Rational(0) : c_[0];
}

long double PiPoly::value() const {
  long double v = 0;
  for (std::size_t i = c_.size(); i-- > 0;) v = v * 3.141592653589793238462643383279502884L + c_[i].to_long_double();
  return v;
}

int PiPoly::sign() const {
  if (c_.empty()) return 0;
  long double scale = 0, pk = 1;
  for (const auto& c : c_) {
    scale += std::fabs(c.to_long_double()) * pk;
    pk *= 3.141592653589793238462643383279502884L;
  }
  const long double v = value();
  if (std::fabs(v) > 1e-14L * scale) return v > 0 ? 1 : -1;
  // Close call: redo in 200-bit floats. A nonzero polynomial in pi is never zero.
  using big = boost::multiprecision::cpp_bin_float_50;
  const big p = boost::multiprecision::default_ops::get_constant_pi<big::backend_type>();
  big w = 0;
  for (std::size_t i = c_.size(); i-- > 0;) w = w * big(p) + big(c_[i].num()) / big(c_[i].den());
  if (w == 0) throw std::domain_error("sign of " + str() + " is not resolved");
  return w > 0 ? 1 : -1;
}

std::string PiPoly::str() const {
  if (c_.empty()) return "0";
  std::string out;
  for (std::size_t i = 0; i < c_.size(); ++i) {
    const Rational& c = c_[i];
    if (c.is_zero()) continue;
    const bool neg = c.sign() < 0;
    if (!out.empty()) out += neg ? "-" : "+";
    else if (neg) out += "-";
    const Rational a = abs(c);
    std::string mono = i == 0 ? "" : (i == 1 ? "pi" : "pi^" + std::to_string(i));
    if (i == 0) out += short_str(a);
    else if (a == Rational(1)) out += mono;
    else out += short_str(a) + "*" + mono;
  }
  return out;
}

PiPoly& PiPoly::operator+=(const PiPoly& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
  for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
  trim();
  return *this;
}

PiPoly& PiPoly::operator-=(const PiPoly& o) { return *this += -o; }

PiPoly PiPoly::operator-() const {
  PiPoly r = *this;
  for (auto& c : r.c_) c = -c;
  return r;
}

PiPoly operator*(const PiPoly& a, const PiPoly& b) {
  PiPoly r;
  if (a.c_.empty() || b.c_.empty()) return r;
  r.c_.assign(a.c_.size() + b.c_.size() - 1, Rational(0));
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) r.c_[i + j] += a.c_[i] * b.c_[j];
  r.trim();
  return r;
}

namespace {

class PiParser {
 public:
  explicit PiParser(const std::string& text) : s_(text) {}

  PiPoly run() {
    skip();
    if (pos_ >= s_.size()) fail("empty expression");
    PiPoly v = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + s_.substr(pos_, 1) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("cannot parse \"" + s_ + "\" at offset " + std::to_string(pos_) + ": " + what);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  PiPoly expr() {
    PiPoly v = term();
    while (true) {
      if (eat('+')) v += term();
      else if (eat('-')) v -= term();
      else return v;
    }
  }
  PiPoly term() {
    PiPoly v = unary();
    while (true) {
      if (eat('*')) {
        v = v * unary();
      } else if (eat('/')) {
        const PiPoly d = unary();
        if (!d.is_rational()) fail("division by an expression involving pi");
        if (d.is_zero()) fail("division by zero");
        v = v * PiPoly(Rational(1) / d.rational());
      } else {
        return v;
      }
    }
  }
  PiPoly unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return power();
  }
  PiPoly power() {
    PiPoly base = primary();
    if (!eat('^')) return base;
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("exponent must be a non-negative integer");
    const int n = std::stoi(s_.substr(start, pos_ - start));
    PiPoly r(Rational(1));
    for (int i = 0; i < n; ++i) r = r * base;
    return r;
  }
  PiPoly primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    if (eat('(')) {
      PiPoly v = expr();
      if (!eat(')')) fail("missing ')'");
      return v;
    }
    if (s_.compare(pos_, 2, "pi") == 0) {
      pos_ += 2;
      return PiPoly::pi();
    }
    if (s_.compare(pos_, 2, "\xCF\x80") == 0) {  // UTF-8 pi
      pos_ += 2;
      return PiPoly::pi();
    }
    if (s_.compare(pos_, 4, "sqrt") == 0) fail("sqrt is only accepted around the whole length");
    if (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.') return number();
    fail("unexpected '" + s_.substr(pos_, 1) + "'");
  }
  PiPoly number() {
    std::int64_t num = 0, den = 1;
    int digits = 0;
    bool frac = false, any = false;
    for (; pos_ < s_.size(); ++pos_) {
      const char c = s_[pos_];
      if (c == '.' && !frac) {
        frac = true;
        continue;
      }
      if (!std::isdigit(static_cast<unsigned char>(c))) break;
      if (++digits > 18) fail("number has too many digits");
      num = num * 10 + (c - '0');
      if (frac) den *= 10;
      any = true;
    }
    if (!any) fail("malformed number");
    return PiPoly(Rational(num, den));
  }

  std::string s_;
  std::size_t pos_ = 0;
};

std::string trim_copy(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

}  // namespace

PiPoly PiPoly::parse(const std::string& text) { return PiParser(text).run(); }

// ---------------------------------------------------------------- lengths

double Length::value() const { return std::sqrt(static_cast<double>(square.value())); }

Length Length::parse(const std::string& text) {
  const std::string t = trim_copy(text);
  Length out;
  out.expr = t;
  bool whole_sqrt = false;
  if (t.rfind("sqrt", 0) == 0) {
    std::size_t p = 4;
    while (p < t.size() && std::isspace(static_cast<unsigned char>(t[p]))) ++p;
    if (p < t.size() && t[p] == '(') {
      int depth = 0;
      std::size_t close = std::string::npos;
      for (std::size_t i = p; i < t.size(); ++i) {
        if (t[i] == '(') ++depth;
        if (t[i] == ')' && --depth == 0) {
          close = i;
          break;
        }
      }
      if (close == t.size() - 1) {
        whole_sqrt = true;
        out.square = PiPoly::parse(t.substr(p + 1, close - p - 1));
      }
    }
  }
  if (!whole_sqrt) {
    const PiPoly v = PiPoly::parse(t);
    if (v.sign() < 0) throw std::invalid_argument("length \"" + t + "\" is negative");
    out.square = v * v;
  }
  if (out.square.sign() < 0) throw std::invalid_argument("length \"" + t + "\" has a negative square");
  return out;
}

Length Length::from_square(const PiPoly& square) {
  Length out;
  out.square = square;
  if (square.is_rational()) {
    if (const auto r = exact_sqrt(square.rational())) {
      out.expr = short_str(*r);
      return out;
    }
  }
  out.expr = "sqrt(" + square.str() + ")";
  return out;
}

LengthWindow LengthWindow::parse(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) throw std::invalid_argument("length window \"" + text + "\" is not of the form a..b");
  LengthWindow w{Length::parse(text.substr(0, dots)), Length::parse(text.substr(dots + 2))};
  if (w.hi < w.lo) throw std::invalid_argument("length window \"" + text + "\" is empty");
  return w;
}

// ---------------------------------------------------------------- two-step geometry

std::optional<PiPoly> TwoStepGeometry::gap2() const {
  if (bracket_norm2.is_zero()) return std::nullopt;
  return PiPoly(Rational(8) / bracket_norm2) * PiPoly::pi() * PiPoly::pi();
}

TwoStepGeometry TwoStepGeometry::build(const LieAlgebra& L, const Metric& m) {
  if (L.step() < 0 || L.step() > 2) throw std::invalid_argument("period formulas need a step <= 2 algebra");
  const std::size_t n = L.dim();
  TwoStepGeometry g;
  g.algebra = L;
  g.metric = m;
  const auto whole = Subspace::whole(n);
  g.center = L.filtration().center;
  g.v = orthogonal_complement(g.center, whole, m);
  g.derived = L.filtration().term(1);
  g.derived_perp = orthogonal_complement(g.derived, whole, m);

  const auto vb = g.v.basis();
  const std::size_t r = vb.size();
  QMatrix G(r, r);
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t b = 0; b < r; ++b) G(a, b) = m.inner(vb[a], vb[b]);
  const QMatrix Gi = r ? *inverse(G) : QMatrix();
  std::vector<std::vector<QVector>> br(r, std::vector<QVector>(r));
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t b = 0; b < r; ++b) br[a][b] = L.bracket(vb[a], vb[b]);
  Rational S = 0;
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t c = 0; c < r; ++c) {
      if (Gi(a, c).is_zero()) continue;
      for (std::size_t b = 0; b < r; ++b)
        for (std::size_t d = 0; d < r; ++d) {
          if (Gi(b, d).is_zero()) continue;
          S += Gi(a, c) * Gi(b, d) * m.inner(br[a][b], br[c][d]);
        }
    }
  g.bracket_norm2 = S;

  if (g.derived.dim() == 1 && r > 0) {
    const QVector zbar = g.derived.basis()[0];
    QMatrix omega(r, r);
    for (std::size_t a = 0; a < r; ++a)
      for (std::size_t b = 0; b < r; ++b) omega(a, b) = m.inner(br[a][b], zbar);
    // <j(z) x, y> = <z, [x, y]>
    const QMatrix J = Gi * omega.transpose();
    const QMatrix J2 = J * J;
    const Rational d = J2(0, 0);
    bool scalar = d.sign() < 0;
    for (std::size_t a = 0; a < r && scalar; ++a)
      for (std::size_t b = 0; b < r; ++b)
        if (J2(a, b) != (a == b ? d : Rational(0))) {
          scalar = false;
          break;
        }
    if (scalar) {
      g.z_hat = zbar;
      g.z_hat_norm2 = m.norm2(zbar);
      g.theta2 = -d / g.z_hat_norm2;
    }
  }
  return g;
}

namespace {

// Intermediate Heisenberg-type periods for ratio r = c / theta and theta^2:
// lambda^2 = 4 pi k r - 4 pi^2 k^2 / theta^2 for integers 1 <= k with 2 pi k < r theta^2.
std::vector<PiPoly> heisenberg_squares(const Rational& r, const Rational& theta2) {
  std::vector<PiPoly> out;
  const PiPoly pi = PiPoly::pi();
  for (std::int64_t k = 1;; ++k) {
    if (!(PiPoly(Rational(2 * k)) * pi < PiPoly(r * theta2))) break;
    out.push_back(PiPoly(Rational(4 * k) * r) * pi - PiPoly(Rational(4 * k * k) / theta2) * pi * pi);
  }
  return out;
}

void add_unique(std::vector<Length>& v, const PiPoly& sq) {
  for (const auto& l : v)
    if (l.square == sq) return;
  v.push_back(Length::from_square(sq));
}

}  // namespace

std::vector<Length> heisenberg_central_lengths(const Rational& c, const Rational& theta) {
  if (c.sign() <= 0 || theta.sign() <= 0) throw std::invalid_argument("heisenberg lengths need c > 0 and theta > 0");
  std::vector<Length> out{Length::from_square(PiPoly(c * c))};
  for (const auto& sq : heisenberg_squares(c / theta, theta * theta)) out.push_back(Length::from_square(sq));
  return out;
}

TwoStepPeriodData two_step_periods(const TwoStepGeometry& g, const QVector& log_gamma) {
  if (is_zero(log_gamma)) throw std::invalid_argument("the identity has no periods");
  const auto& m = g.metric;
  TwoStepPeriodData d;
  d.log = log_gamma;
  d.V = orthogonal_projection(log_gamma, g.v, m);
  d.Z = log_gamma - d.V;
  std::vector<QVector> img;
  for (std::size_t i = 0; i < g.algebra.dim(); ++i) img.push_back(g.algebra.bracket(d.V, g.algebra.basis_vector(i)));
  const auto span = Subspace::span(g.algebra.dim(), img);
  d.Zss = span.dim() ? d.Z - orthogonal_projection(d.Z, span, m) : d.Z;
  d.v2 = m.norm2(d.V);
  d.z2 = m.norm2(d.Zss);
  d.min_is_period = d.z2.is_zero();
  const PiPoly max2(d.v2 + d.z2);
  d.definite.push_back(Length::from_square(max2));
  d.exhaustive = d.z2.is_zero() || !g.gap2();

  if (g.heisenberg_type()) {
    if (!is_zero(d.V)) {
      d.exhaustive = true;
    } else {
      const Rational p = m.inner(d.Z, *g.z_hat);
      const Rational c2 = p * p / g.z_hat_norm2;
      const QVector A = d.Z - (p / g.z_hat_norm2) * *g.z_hat;
      const Rational a2 = m.norm2(A);
      if (c2.is_zero()) {
        d.exhaustive = true;
      } else if (const auto r = exact_sqrt(c2 / g.theta2)) {
        for (const auto& sq : heisenberg_squares(*r, g.theta2)) add_unique(d.definite, sq + PiPoly(a2));
        d.exhaustive = true;
      }
    }
  }
  std::sort(d.definite.begin(), d.definite.end());
  return d;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::yes: return "yes";
    case Verdict::no: return "no";
    default: return "unknown";
  }
}

PeriodDecision decide_period(const TwoStepGeometry& g, const TwoStepPeriodData& d, const PiPoly& target) {
  if (target.sign() <= 0) return {Verdict::no, "lengths are positive"};
  const PiPoly v2(d.v2), max2(d.v2 + d.z2);
  if (target == max2) return {Verdict::yes, "largest period sqrt(|V*|^2 + |Z**|^2)"};
  if (d.exhaustive) {
    for (const auto& l : d.definite)
      if (l.square == target) return {Verdict::yes, "closed form"};
    return {Verdict::no, "not among the closed-form periods"};
  }
  if (target < v2 || max2 < target) return {Verdict::no, "outside [|V*|, sqrt(|V*|^2 + |Z**|^2)]"};
  if (target == v2) return {Verdict::no, "|V*| is a period only when Z** = 0"};
  const auto gap = g.gap2();
  if (!gap || target < *gap) return {Verdict::no, "below the rotation bound sqrt(8 pi^2 / S)"};
  return {Verdict::unknown, "intermediate length not decided by the structured cases"};
}

namespace {

// Squared-length range in [lo2, hi2] where undecided intermediate periods could lie.
std::optional<std::pair<PiPoly, PiPoly>> unknown_range(const TwoStepGeometry& g, const TwoStepPeriodData& d,
                                                       const PiPoly& lo2, const PiPoly& hi2) {
  if (d.exhaustive) return std::nullopt;
  const auto gap = g.gap2();
  if (!gap) return std::nullopt;
  const PiPoly v2(d.v2), max2(d.v2 + d.z2);
  PiPoly lo = v2;
  if (lo < *gap) lo = *gap;
  if (lo < lo2) lo = lo2;
  PiPoly hi = max2 < hi2 ? max2 : hi2;
  if (lo < hi) return std::make_pair(lo, hi);
  if (lo == hi && v2 < lo && lo < max2) return std::make_pair(lo, hi);
  return std::nullopt;
}

}  // namespace

PeriodList periods_between(const TwoStepGeometry& g, const TwoStepPeriodData& d, const PiPoly& lo2, const PiPoly& hi2) {
  PeriodList out;
  for (const auto& l : d.definite)
    if (lo2 <= l.square && l.square <= hi2) out.periods.push_back(l);
  out.complete = !unknown_range(g, d, lo2, hi2);
  return out;
}

// ---------------------------------------------------------------- lattice context

SpectrumContext::SpectrumContext(const Lattice& lat, const Metric& m)
    : lat_(&lat), metric_(m), invariant_(lat) {
  if (lat.algebra().step() != 3 || lat.layers() != 3)
    throw std::invalid_argument("spectrum counts need a step-3 algebra with a three-layer lattice");
  quotient_ = quotient_algebra(lat.algebra(), m);
  two_step_ = TwoStepGeometry::build(quotient_.algebra, quotient_.metric);
  const auto top = lat.layer(0);
  std::vector<QVector> p;
  for (std::size_t i = top.first; i < top.second; ++i)
    p.push_back(orthogonal_projection(quotient_.project(lat.generators()[i]), two_step_.derived_perp, quotient_.metric));
  top_gram_ = QMatrix(p.size(), p.size());
  for (std::size_t a = 0; a < p.size(); ++a)
    for (std::size_t b = 0; b < p.size(); ++b) top_gram_(a, b) = quotient_.metric.inner(p[a], p[b]);
}

Rational SpectrumContext::top_norm2(const IVector& t) const {
  Rational s = 0;
  for (std::size_t a = 0; a < t.size(); ++a)
    for (std::size_t b = 0; b < t.size(); ++b)
      if (t[a] && t[b]) s += Rational(t[a]) * Rational(t[b]) * top_gram_(a, b);
  return s;
}

namespace {

// Integer points of the box |x_i| <= r_i.
void for_box(const IVector& r, const std::function<void(const IVector&)>& f) {
  IVector x(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) x[i] = -r[i];
  while (true) {
    f(x);
    std::size_t i = 0;
    for (; i < x.size(); ++i) {
      if (x[i] < r[i]) {
        ++x[i];
        break;
      }
      x[i] = -r[i];
    }
    if (i == x.size()) return;
  }
}

// Box radii containing the ellipsoid x^T Q x <= bound.
IVector ellipsoid_box(const QMatrix& Q, const PiPoly& bound) {
  IVector r(Q.rows(), 0);
  if (Q.rows() == 0) return r;
  const auto Qi = inverse(Q);
  if (!Qi) throw std::domain_error("quadratic form is degenerate");
  const long double B = bound.value();
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] = static_cast<std::int64_t>(std::floor(std::sqrt(B * (*Qi)(i, i).to_long_double()))) + 1;
  return r;
}

}  // namespace

std::vector<IVector> SpectrumContext::tops_within(const PiPoly& bound) const {
  std::vector<IVector> out;
  if (bound.sign() < 0) return out;
  for_box(ellipsoid_box(top_gram_, bound), [&](const IVector& t) {
    if (PiPoly(top_norm2(t)) <= bound) out.push_back(t);
  });
  return out;
}

IVector SpectrumContext::tuple(const IVector& t, const IVector& k) const {
  IVector e(lat_->rank(), 0);
  const auto top = lat_->layer(0), mid = lat_->layer(1);
  for (std::size_t i = top.first; i < top.second; ++i) e[i] = t[i - top.first];
  for (std::size_t i = mid.first; i < mid.second && !k.empty(); ++i) e[i] = k[i - mid.first];
  return e;
}

std::vector<IVector> SpectrumContext::middles(const IVector& t, std::int64_t w) const {
  const auto tau = invariant_.middle_lattice(tuple(t, {}));
  const std::size_t m1 = lat_->layer_size(1);
  std::vector<std::int64_t> lo(m1, -w), hi(m1, w);
  for (std::size_t c = 0; c < tau.rank(); ++c) {
    lo[tau.pivots[c]] = 0;
    hi[tau.pivots[c]] = tau.H(tau.pivots[c], c) - 1;
  }
  std::vector<IVector> out;
  IVector k = lo;
  while (true) {
    out.push_back(k);
    std::size_t i = 0;
    for (; i < m1; ++i) {
      if (k[i] < hi[i]) {
        ++k[i];
        break;
      }
      k[i] = lo[i];
    }
    if (i == m1) break;
  }
  return out;
}

TwoStepPeriodData SpectrumContext::quotient_data(const IVector& t, const IVector& k) const {
  return two_step_periods(two_step_, quotient_.project(lat_->word_to_element(tuple(t, k))));
}

std::int64_t SpectrumContext::bottom_count(const IVector& t, const IVector& k) const {
  const auto idx = invariant_.bottom_lattice(tuple(t, k)).index();
  if (!idx) throw std::domain_error("infinitely many classes over one quotient class");
  return *idx;
}

std::vector<std::pair<IVector, Rational>> SpectrumContext::central_within(const PiPoly& lo2, const PiPoly& hi2) const {
  const auto cb = lat_->central_basis();
  std::vector<QVector> z;
  for (const auto& e : cb) z.push_back(lat_->word_to_element(e));
  QMatrix G(z.size(), z.size());
  for (std::size_t a = 0; a < z.size(); ++a)
    for (std::size_t b = 0; b < z.size(); ++b) G(a, b) = metric_.inner(z[a], z[b]);
  std::vector<std::pair<IVector, Rational>> out;
  if (hi2.sign() <= 0) return out;
  for_box(ellipsoid_box(G, hi2), [&](const IVector& c) {
    Rational n2 = 0;
    for (std::size_t a = 0; a < c.size(); ++a)
      for (std::size_t b = 0; b < c.size(); ++b)
        if (c[a] && c[b]) n2 += Rational(c[a]) * Rational(c[b]) * G(a, b);
    if (n2.is_zero() || !(lo2 <= PiPoly(n2) && PiPoly(n2) <= hi2)) return;
    IVector e(lat_->rank(), 0);
    for (std::size_t a = 0; a < c.size(); ++a)
      for (std::size_t i = 0; i < e.size(); ++i) e[i] += c[a] * cb[a][i];
    out.emplace_back(std::move(e), n2);
  });
  return out;
}

PeriodDecision transfer_period(const SpectrumContext& ctx, const IVector& gamma, const Length& lambda) {
  const auto& lat = ctx.lattice();
  const QVector x = lat.word_to_element(gamma);
  if (is_zero(x)) return {Verdict::no, "the identity has no periods"};
  if (lat.algebra().filtration().center.contains(x)) {
    if (PiPoly(ctx.metric().norm2(x)) == lambda.square) return {Verdict::yes, "central: fiber geodesic"};
    return {Verdict::unknown, "central element: only the fiber length |log gamma| is certified"};
  }
  const auto d = two_step_periods(ctx.two_step(), ctx.quotient().project(x));
  return decide_period(ctx.two_step(), d, lambda.square);
}

CentralWitness central_period_witness(const Geometry& g, const LieAlgebra& L, const Metric& m, const QVector& gamma) {
  if (is_zero(gamma) || !L.filtration().center.contains(gamma))
    throw std::invalid_argument("central witness needs a nonzero central element");
  CentralWitness w;
  w.lambda = Length::from_square(PiPoly(m.norm2(gamma)));
  const double lam = w.lambda.value();
  const Vec gf = g.to_frame(gamma);
  w.certificate = certify(g, gf, lam, Vec::Zero(static_cast<Eigen::Index>(g.dim())), gf / lam);
  return w;
}

std::string to_string(Completeness c) {
  return c == Completeness::complete_for_structured_cases ? "complete_for_structured_cases" : "provisional";
}

// ---------------------------------------------------------------- counts

namespace {

struct Found {
  PiPoly square;
  std::int64_t count;
  IVector witness;
};

struct Scan {
  std::map<std::vector<Rational>, std::pair<PiPoly, std::int64_t>> m_prime;  // keyed by square coefficients
  std::map<std::vector<Rational>, std::vector<IVector>> witnesses;
  std::vector<std::pair<PiPoly, PiPoly>> unknown;
  bool same_counts(const Scan& o) const {
    if (m_prime.size() != o.m_prime.size() || unknown.size() != o.unknown.size()) return false;
    for (const auto& [k, v] : m_prime) {
      const auto it = o.m_prime.find(k);
      if (it == o.m_prime.end() || it->second.second != v.second) return false;
    }
    for (std::size_t i = 0; i < unknown.size(); ++i)
      if (!(unknown[i].first == o.unknown[i].first && unknown[i].second == o.unknown[i].second)) return false;
    return true;
  }
};

Scan scan_noncentral(const SpectrumContext& ctx, const PiPoly& lo2, const PiPoly& hi2, std::int64_t w) {
  const auto tops = ctx.tops_within(hi2);
  std::vector<std::vector<Found>> found(tops.size());
  std::vector<std::vector<std::pair<PiPoly, PiPoly>>> unknown(tops.size());
  parallel_for(tops.size(), [&](std::size_t i) {
    const IVector& t = tops[i];
    const bool zero_top = std::all_of(t.begin(), t.end(), [](std::int64_t x) { return x == 0; });
    for (const auto& k : ctx.middles(t, w)) {
      if (zero_top && std::all_of(k.begin(), k.end(), [](std::int64_t x) { return x == 0; })) continue;
      const auto d = ctx.quotient_data(t, k);
      if (hi2 < PiPoly(d.v2)) continue;
      const auto pl = periods_between(ctx.two_step(), d, lo2, hi2);
      if (const auto r = unknown_range(ctx.two_step(), d, lo2, hi2)) unknown[i].push_back(*r);
      if (pl.periods.empty()) continue;
      const std::int64_t bc = ctx.bottom_count(t, k);
      for (const auto& l : pl.periods) found[i].push_back({l.square, bc, ctx.tuple(t, k)});
    }
  });
  Scan s;
  for (std::size_t i = 0; i < tops.size(); ++i) {
    for (auto& f : found[i]) {
      auto& slot = s.m_prime[f.square.coefficients()];
      slot.first = f.square;
      slot.second += f.count;
      s.witnesses[f.square.coefficients()].push_back(std::move(f.witness));
    }
    for (auto& u : unknown[i]) s.unknown.push_back(std::move(u));
  }
  std::sort(s.unknown.begin(), s.unknown.end(), [](const auto& a, const auto& b) {
    if (!(a.first == b.first)) return a.first < b.first;
    return a.second < b.second;
  });
  s.unknown.erase(std::unique(s.unknown.begin(), s.unknown.end(),
                              [](const auto& a, const auto& b) { return a.first == b.first && a.second == b.second; }),
                  s.unknown.end());
  return s;
}

bool in_ranges(const std::vector<std::pair<PiPoly, PiPoly>>& ranges, const PiPoly& x) {
  for (const auto& [lo, hi] : ranges)
    if (lo <= x && x <= hi) return true;
  return false;
}

}  // namespace

SpectrumEntry SweepResult::at(const Length& lambda) const {
  for (const auto& e : entries)
    if (e.lambda.square == lambda.square) return e;
  SpectrumEntry e;
  e.lambda = lambda;
  e.free_window = free_window;
  e.window_certified = certified;
  e.completeness = (!certified || in_ranges(unknown_ranges, lambda.square)) ? Completeness::provisional
                                                                            : Completeness::complete_for_structured_cases;
  return e;
}

SweepResult sweep(const SpectrumContext& ctx, const LengthWindow& window) {
  const PiPoly lo2 = window.lo.square, hi2 = window.hi.square;
  const std::int64_t w0 = static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(hi2.value())))) + 2;
  std::int64_t w = w0;
  Scan cur = scan_noncentral(ctx, lo2, hi2, w);
  bool certified = false;
  for (int doubling = 0; doubling < 3; ++doubling) {
    Scan next = scan_noncentral(ctx, lo2, hi2, 2 * w);
    w *= 2;
    const bool same = cur.same_counts(next);
    cur = std::move(next);
    if (same) {
      certified = true;
      break;
    }
  }

  SweepResult out;
  out.free_window = w;
  out.certified = certified;
  out.unknown_ranges = cur.unknown;
  std::map<std::vector<Rational>, SpectrumEntry> entries;
  auto slot = [&](const PiPoly& sq) -> SpectrumEntry& {
    auto& e = entries[sq.coefficients()];
    if (e.lambda.expr.empty()) e.lambda = Length::from_square(sq);
    return e;
  };
  for (const auto& [key, v] : cur.m_prime) {
    auto& e = slot(v.first);
    e.m_prime = v.second;
    e.witnesses = cur.witnesses[key];
  }
  for (const auto& [tuple, n2] : ctx.central_within(lo2, hi2)) {
    auto& e = slot(PiPoly(n2));
    ++e.m_dprime;
    e.witnesses.push_back(tuple);
  }
  for (auto& [key, e] : entries) {
    e.free_window = w;
    e.window_certified = certified;
    if (!certified || in_ranges(out.unknown_ranges, e.lambda.square)) e.completeness = Completeness::provisional;
    out.entries.push_back(std::move(e));
  }
  std::sort(out.entries.begin(), out.entries.end(),
            [](const SpectrumEntry& a, const SpectrumEntry& b) { return a.lambda < b.lambda; });
  return out;
}

SpectrumEntry multiplicity_at(const SpectrumContext& ctx, const Length& lambda) {
  const auto r = sweep(ctx, LengthWindow{lambda, lambda});
  SpectrumEntry e = r.at(lambda);
  e.lambda = lambda;
  return e;
}

namespace {

std::string tuple_str(const IVector& e) {
  std::string s = "(";
  for (std::size_t i = 0; i < e.size(); ++i) s += (i ? " " : "") + std::to_string(e[i]);
  return s + ")";
}

std::string float_str(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

}  // namespace

std::string spectrum_csv(const std::vector<SpectrumEntry>& entries) {
  std::string out = "lambda_expression,lambda_float,m_prime,m_dprime,completeness,witnesses\n";
  for (const auto& e : entries) {
    std::string w;
    for (const auto& t : e.witnesses) w += (w.empty() ? "" : ";") + tuple_str(t);
    out += "\"" + e.lambda.expr + "\"," + float_str(e.lambda.value()) + "," + std::to_string(e.m_prime) + "," +
           std::to_string(e.m_dprime) + "," + to_string(e.completeness) + ",\"" + w + "\"\n";
  }
  return out;
}

// ---------------------------------------------------------------- comparisons

std::int64_t classes_in_G_class(const SpectrumContext& ctx, const QVector& x) {
  const auto& lat = ctx.lattice();
  const auto& L = lat.algebra();
  const auto& F = L.filtration();
  if (x.size() != L.dim()) throw std::invalid_argument("element has the wrong dimension");
  if (F.center.contains(x)) return lat.contains(x) ? 1 : 0;

  const auto top = lat.layer(0), mid = lat.layer(1), bot = lat.layer(2);
  auto leading = [&](std::pair<std::size_t, std::size_t> layer, const Subspace& rest, const QVector& v) {
    std::vector<QVector> cols;
    for (std::size_t i = layer.first; i < layer.second; ++i) cols.push_back(lat.generators()[i]);
    for (const auto& b : rest.basis()) cols.push_back(b);
    const auto sol = solve(QMatrix::from_columns(cols), v);
    if (!sol) throw std::logic_error("lattice generators do not span the layer");
    return QVector(sol->begin(), sol->begin() + static_cast<std::ptrdiff_t>(layer.second - layer.first));
  };

  const QVector tq = leading(top, F.term(1), x);
  IVector t;
  for (const auto& r : tq) {
    if (!r.is_integer()) return 0;
    t.push_back(r.num());
  }
  const QVector rest = bch_product(L, group_inverse(lat.word_to_element(ctx.tuple(t, {}))), x);
  const QVector mx = leading(mid, F.term(2), rest);

  const auto tau = ctx.invariant().middle_lattice(ctx.tuple(t, {}));
  const std::size_t m1 = mid.second - mid.first, rk = tau.rank();
  const auto free = tau.free_rows();
  // Unknowns (c, f): k = mx + H c, with k given on pivot rows and k = f on free rows.
  QMatrix A(m1, rk + free.size());
  for (std::size_t i = 0; i < m1; ++i)
    for (std::size_t c = 0; c < rk; ++c) A(i, c) = Rational(tau.H(i, c));
  for (std::size_t f = 0; f < free.size(); ++f) A(free[f], rk + f) = Rational(-1);

  std::vector<std::int64_t> piv(rk);
  for (std::size_t c = 0; c < rk; ++c) piv[c] = tau.H(tau.pivots[c], c);
  std::int64_t count = 0;
  IVector r(rk, 0);
  while (true) {
    QVector b(m1);
    for (std::size_t i = 0; i < m1; ++i) b[i] = -mx[i];
    for (std::size_t c = 0; c < rk; ++c) b[tau.pivots[c]] += Rational(r[c]);
    const auto sol = solve(A, b);
    bool integral = sol.has_value();
    IVector k(m1, 0);
    for (std::size_t c = 0; c < rk; ++c) k[tau.pivots[c]] = r[c];
    for (std::size_t f = 0; integral && f < free.size(); ++f) {
      const Rational v = (*sol)[rk + f];
      if (!v.is_integer()) integral = false;
      else k[free[f]] = v.num();
    }
    if (integral) {
      const auto phi = ctx.invariant().bottom_lattice(ctx.tuple(t, k));
      if (!phi.full_rank()) throw std::domain_error("infinitely many classes over one quotient class");
      const std::size_t m2 = bot.second - bot.first;
      std::vector<std::int64_t> jp(m2);
      for (std::size_t c = 0; c < m2; ++c) jp[phi.pivots[c]] = phi.H(phi.pivots[c], c);
      IVector j(m2, 0);
      while (true) {
        IVector e = ctx.tuple(t, k);
        for (std::size_t i = 0; i < m2; ++i) e[bot.first + i] = j[i];
        if (is_conjugate_in_G(L, x, lat.word_to_element(e))) ++count;
        std::size_t i = 0;
        for (; i < m2; ++i) {
          if (++j[i] < jp[i]) break;
          j[i] = 0;
        }
        if (i == m2) break;
      }
    }
    std::size_t c = 0;
    for (; c < rk; ++c) {
      if (++r[c] < piv[c]) break;
      r[c] = 0;
    }
    if (c == rk) break;
  }
  return count;
}

namespace {

void summarize(ComparisonReport& rep) {
  for (const auto& row : rep.rows) {
    const bool a = row.first.m_prime + row.first.m_dprime > 0, b = row.second.m_prime + row.second.m_dprime > 0;
    if (a != b) rep.lengths_agree = false;
    if (row.first.m_dprime != row.second.m_dprime) rep.central_columns_equal = false;
    if (!row.complete()) rep.complete = false;
    if (!rep.differing && row.differs() && row.complete()) rep.differing = row.lambda;
  }
}

}  // namespace

std::string ComparisonReport::same_length_spectrum() const {
  if (differing) return "no";
  bool any = false;
  for (const auto& r : rows) any = any || r.differs();
  if (complete && !any) return "yes";
  return "undetermined";
}

ComparisonReport compare_length_spectra(const SpectrumContext& a, const SpectrumContext& b,
                                        const std::vector<Length>& lambdas) {
  ComparisonReport rep;
  for (const auto& l : lambdas) rep.rows.push_back({l, multiplicity_at(a, l), multiplicity_at(b, l)});
  summarize(rep);
  return rep;
}

ComparisonReport compare_length_spectra(const SpectrumContext& a, const SpectrumContext& b,
                                        const LengthWindow& window) {
  const auto sa = sweep(a, window), sb = sweep(b, window);
  std::vector<Length> all;
  for (const auto* s : {&sa, &sb})
    for (const auto& e : s->entries) all.push_back(e.lambda);
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  ComparisonReport rep;
  for (const auto& l : all) rep.rows.push_back({l, sa.at(l), sb.at(l)});
  summarize(rep);
  if (!sa.certified || !sb.certified || !sa.unknown_ranges.empty() || !sb.unknown_ranges.empty()) rep.complete = false;
  return rep;
}

std::vector<ClassCountSample> sample_class_counts(const SpectrumContext& a, const SpectrumContext& b, int samples,
                                                  std::uint64_t seed, std::int64_t exponent_bound) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> ex(-exponent_bound, exponent_bound);
  std::uniform_int_distribution<std::int64_t> num(-4, 4);
  std::vector<ClassCountSample> out;
  const auto& L = a.lattice().algebra();
  for (int s = 0; s < samples; ++s) {
    const Lattice& lat = (s % 2 == 0 ? a : b).lattice();
    IVector e(lat.rank());
    for (auto& v : e) v = ex(rng);
    QVector x = lat.word_to_element(e);
    if (s % 3 == 2) {
      QVector g(L.dim());
      for (auto& v : g) v = Rational(num(rng), 2);
      x = conjugate(L, g, x);
    }
    ClassCountSample c;
    c.x = x;
    c.first = classes_in_G_class(a, x);
    c.second = classes_in_G_class(b, x);
    out.push_back(std::move(c));
  }
  return out;
}

std::string comparison_csv(const ComparisonReport& r) {
  std::string out = "lambda_expression,lambda_float,m_prime_1,m_dprime_1,m_prime_2,m_dprime_2,differs,completeness\n";
  for (const auto& row : r.rows) {
    out += "\"" + row.lambda.expr + "\"," + float_str(row.lambda.value()) + "," + std::to_string(row.first.m_prime) +
           "," + std::to_string(row.first.m_dprime) + "," + std::to_string(row.second.m_prime) + "," +
           std::to_string(row.second.m_dprime) + "," + (row.differs() ? "true" : "false") + "," +
           (row.complete() ? "complete_for_structured_cases" : "provisional") + "\n";
  }
  return out;
}

}  // namespace nilspec
