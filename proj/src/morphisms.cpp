#include "nilspec/morphisms.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "nilspec/spectra.hpp"

namespace nilspec {

namespace {

QMatrix matrix_power_series_exp(const QMatrix& A) {
  const std::size_t n = A.rows();
  QMatrix out = QMatrix::identity(n), term = QMatrix::identity(n);
  for (std::size_t k = 1; k <= n; ++k) {
    term = term * A;
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) term(r, c) = term(r, c) / Rational(static_cast<std::int64_t>(k));
    bool zero = true;
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) {
        out(r, c) += term(r, c);
        zero = zero && term(r, c).is_zero();
      }
    if (zero) break;
  }
  return out;
}

bool is_zero_matrix(const QMatrix& m) {
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c)
      if (!m(r, c).is_zero()) return false;
  return true;
}

json pair_json(std::size_t i, std::size_t j, const LieAlgebra* L = nullptr) {
  if (L) return json::array({L->labels()[i], L->labels()[j]});
  return json::array({i, j});
}

json ivector_json(const IVector& v) {
  json a = json::array();
  for (auto x : v) a.push_back(x);
  return a;
}

void fill_constant_witness(const Morphism& M, AlmostInnerResult& r) {
  if (r.verdict != AlmostInnerVerdict::passed_randomized || r.witnesses.empty()) return;
  if (auto a = inner_witness(M)) {
    for (auto& w : r.witnesses) w.a = *a;
    r.constant_witness = a;
    return;
  }
  const auto& L = *M.algebra;
  const QVector a = r.witnesses.front().a;
  for (const auto& w : r.witnesses)
    if (conjugate(L, a, w.x) != M(w.x)) return;
  r.constant_witness = a;
}

}  // namespace

Morphism::Morphism(std::shared_ptr<const LieAlgebra> L, QMatrix m) : algebra(std::move(L)), matrix(std::move(m)) {
  if (!algebra) throw std::invalid_argument("morphism without an algebra");
  if (matrix.rows() != algebra->dim() || matrix.cols() != algebra->dim())
    throw std::invalid_argument("morphism matrix is " + std::to_string(matrix.rows()) + "x" +
                                std::to_string(matrix.cols()) + ", algebra has dimension " +
                                std::to_string(algebra->dim()));
}

Morphism Morphism::identity(std::shared_ptr<const LieAlgebra> L) {
  const auto n = L->dim();
  return Morphism(std::move(L), QMatrix::identity(n));
}

Morphism compose(const Morphism& a, const Morphism& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("compose: dimension mismatch");
  return Morphism(a.algebra, a.matrix * b.matrix);
}

Morphism inner_automorphism(std::shared_ptr<const LieAlgebra> L, const QVector& a) {
  const auto A = L->ad(a);
  return Morphism(std::move(L), matrix_power_series_exp(A));
}

std::optional<QVector> inner_witness(const Morphism& M) {
  const auto& L = *M.algebra;
  const std::size_t n = L.dim();
  // log M = N - N^2/2 + N^3/3 - ..., N = M - 1 must be nilpotent.
  const QMatrix N = M.matrix - QMatrix::identity(n);
  QMatrix logm(n, n), power = QMatrix::identity(n);
  bool nilpotent = false;
  for (std::size_t k = 1; k <= n + 1; ++k) {
    power = power * N;
    if (is_zero_matrix(power)) {
      nilpotent = true;
      break;
    }
    const Rational c(k % 2 ? 1 : -1, static_cast<std::int64_t>(k));
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t col = 0; col < n; ++col) logm(r, col) += c * power(r, col);
  }
  if (!nilpotent) return std::nullopt;
  // ad(a) = sum a_i ad(b_i), flattened to n^2 equations.
  QMatrix sys(n * n, n);
  QVector rhs(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto Ai = L.ad(L.basis_vector(i));
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) sys(r * n + c, i) = Ai(r, c);
  }
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) rhs[r * n + c] = logm(r, c);
  auto a = solve(sys, rhs);
  if (!a) return std::nullopt;
  if (inner_automorphism(M.algebra, *a).matrix != M.matrix) return std::nullopt;
  return a;
}

AutomorphismCheck is_lie_algebra_automorphism(const Morphism& M) {
  AutomorphismCheck out;
  out.invertible = inverse(M.matrix).has_value();
  const auto& L = *M.algebra;
  const auto cols = M.matrix.column_list();
  for (std::size_t i = 0; i < L.dim() && !out.violating_pair; ++i)
    for (std::size_t j = i + 1; j < L.dim(); ++j)
      if (M(L.bracket(L.basis_vector(i), L.basis_vector(j))) != L.bracket(cols[i], cols[j])) {
        out.violating_pair = {i, j};
        break;
      }
  return out;
}

QVector apply_to_group(const Morphism& M, const QVector& x) {
  if (!is_lie_algebra_automorphism(M).ok()) throw std::invalid_argument("apply_to_group: map is not an automorphism");
  if (x.size() != M.dim()) throw std::invalid_argument("apply_to_group: dimension mismatch");
  return M(x);
}

LatticeMapCheck maps_lattice(const Morphism& M, const Lattice& lat1, const Lattice& lat2) {
  LatticeMapCheck out;
  const auto inv = inverse(M.matrix);
  if (!inv) {
    out.ok = false;
    out.failures.push_back("map is not invertible");
    return out;
  }
  for (std::size_t i = 0; i < lat1.rank(); ++i)
    if (!lat2.contains(M(lat1.generators()[i]))) {
      out.ok = false;
      out.failures.push_back("image of " + lat1.names()[i] + " is not in the target lattice");
    }
  for (std::size_t i = 0; i < lat2.rank(); ++i)
    if (!lat1.contains(*inv * lat2.generators()[i])) {
      out.ok = false;
      out.failures.push_back("preimage of " + lat2.names()[i] + " is not in the source lattice");
    }
  return out;
}

IsometryCheck is_isometry(const Morphism& M, const Metric& m) { return matrix_isometry(M.matrix, m); }

IsometryCheck matrix_isometry(const QMatrix& M, const Metric& m) {
  IsometryCheck out;
  const auto cols = M.column_list();
  const auto n = M.cols();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const auto e = m.inner(unit_vector(n, i), unit_vector(n, j));
      const auto a = m.inner(cols[i], cols[j]);
      if (e != a) {
        out.ok = false;
        out.violating_pair = {i, j};
        out.expected = e;
        out.actual = a;
        return out;
      }
    }
  return out;
}

std::string to_string(AlmostInnerVerdict v) {
  return v == AlmostInnerVerdict::proven_false ? "proven_false" : "passed_randomized";
}

std::vector<QVector> almost_inner_samples(std::size_t n, int samples, std::uint64_t seed) {
  std::vector<QVector> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(unit_vector(n, i));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) out.push_back(unit_vector(n, i) + unit_vector(n, j));
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> num(-3, 3), den(1, 2);
  for (int s = 0; s < samples; ++s) {
    QVector x(n);
    for (auto& c : x) c = Rational(num(rng), den(rng));
    out.push_back(std::move(x));
  }
  return out;
}

AlmostInnerResult is_almost_inner(const Morphism& M, int samples, std::uint64_t seed) {
  if (!is_lie_algebra_automorphism(M).ok()) throw std::invalid_argument("is_almost_inner: map is not an automorphism");
  const auto& L = *M.algebra;
  AlmostInnerResult out;
  for (const auto& x : almost_inner_samples(L.dim(), samples, seed)) {
    ++out.checked;
    const QVector y = M(x);
    auto a = is_conjugate_in_G(L, x, y);
    if (!a) {
      out.verdict = AlmostInnerVerdict::proven_false;
      out.counterexample = x;
      out.counterexample_image = y;
      return out;
    }
    out.witnesses.push_back({x, *a, {}});
  }
  fill_constant_witness(M, out);
  return out;
}

AlmostInnerResult is_gamma_almost_inner(const Lattice& lat, const std::function<QVector(const IVector&)>& image,
                                        const Window& window) {
  const auto& L = lat.algebra();
  AlmostInnerResult out;
  window.for_each([&](const IVector& e) {
    if (out.verdict == AlmostInnerVerdict::proven_false) return;
    ++out.checked;
    const QVector x = lat.word_to_element(e), y = image(e);
    auto a = is_conjugate_in_G(L, x, y);
    if (!a) {
      out.verdict = AlmostInnerVerdict::proven_false;
      out.counterexample = x;
      out.counterexample_image = y;
      out.counterexample_word = e;
      return;
    }
    out.witnesses.push_back({x, *a, e});
  });
  return out;
}

AlmostInnerResult is_gamma_almost_inner(const Morphism& M, const Lattice& lat, const Window& window) {
  auto out = is_gamma_almost_inner(lat, [&](const IVector& e) { return M(lat.word_to_element(e)); }, window);
  fill_constant_witness(M, out);
  return out;
}

Morphism project_morphism(const Morphism& M, const Quotient& q, std::shared_ptr<const LieAlgebra> quotient_algebra) {
  for (const auto& k : q.kernel.basis())
    if (!q.kernel.contains(M(k)))
      throw std::invalid_argument("project_morphism: map does not preserve the last derived term");
  return Morphism(std::move(quotient_algebra), q.proj * M.matrix * q.section);
}

Lattice project_lattice(const Lattice& lat, const Quotient& q, std::shared_ptr<const LieAlgebra> quotient_algebra) {
  std::vector<QVector> gens;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < lat.rank(); ++i) {
    auto v = q.project(lat.generators()[i]);
    if (is_zero(v)) continue;
    gens.push_back(std::move(v));
    names.push_back(lat.names()[i]);
  }
  return Lattice(std::move(quotient_algebra), std::move(gens), std::move(names));
}

MarkingReport verify_marking(const Morphism& phi, const Lattice& lat1, const Lattice& lat2, const Metric& metric,
                             const std::optional<Factorization>& factors, const MarkingOptions& opts) {
  const auto& L = *phi.algebra;
  MarkingReport r;

  // (a)
  {
    auto& c = r.generator_image;
    const auto aut = is_lie_algebra_automorphism(phi);
    const auto maps = maps_lattice(phi, lat1, lat2);
    c.ok = aut.ok() && maps.ok;
    c.witness = json::object();
    c.witness["automorphism"] = aut.ok();
    if (aut.violating_pair) c.witness["violating_pair"] = pair_json(aut.violating_pair->first, aut.violating_pair->second, &L);
    c.witness["failures"] = maps.failures;
    if (!aut.ok()) c.detail = aut.invertible ? "map does not preserve brackets" : "map is not invertible";
    else if (!maps.ok) c.detail = maps.failures.front();
    else c.detail = "automorphism carrying every generator into the target lattice and back";
  }

  // (b)
  const auto central1 = lat1.central_basis();
  {
    auto& c = r.central_intersection;
    c.ok = true;
    c.witness = json::array();
    for (const auto& e : central1) {
      const auto x = lat1.word_to_element(e);
      const bool in = lat2.contains(x);
      c.ok = c.ok && in;
      c.witness.push_back({{"element", vector_to_json(x)}, {"in_other", in}});
    }
    for (const auto& e : lat2.central_basis()) {
      const auto x = lat2.word_to_element(e);
      const bool in = lat1.contains(x);
      c.ok = c.ok && in;
      c.witness.push_back({{"element", vector_to_json(x)}, {"in_other", in}});
    }
    c.detail = c.ok ? "equal central intersections" : "central intersections differ";
  }

  // (c)
  {
    auto& c = r.central_case;
    c.ok = true;
    c.witness = json::array();
    for (const auto& e : central1) {
      const auto x = lat1.word_to_element(e);
      const auto y = phi(x);
      const std::string kind = y == x ? "fixed" : y == -x ? "inverted" : "other";
      c.ok = c.ok && kind != "other";
      c.witness.push_back({{"generator", vector_to_json(x)}, {"image", vector_to_json(y)}, {"case", kind}});
    }
    c.detail = c.ok ? "central generators fixed or inverted" : "a central generator is sent elsewhere";
  }

  const auto q = quotient_algebra(L, metric);
  const auto Q = std::make_shared<const LieAlgebra>(q.algebra);

  // (d)
  {
    auto& c = r.projection_factorization;
    if (!factors) {
      c.ran = false;
      c.ok = false;
      c.detail = "no factorization candidate supplied; report is not certifying";
    } else {
      r.certifying = true;
      c.witness = json::object();
      const Morphism psi1(Q, factors->psi1), psi2(Q, factors->psi2);
      const auto bar = project_morphism(phi, q, Q);
      const bool factors_ok = bar.matrix == factors->psi1 * factors->psi2;
      const auto a1 = is_lie_algebra_automorphism(psi1), a2 = is_lie_algebra_automorphism(psi2);
      const auto iso = is_isometry(psi1, q.metric);
      c.witness["projection"] = matrix_to_json(bar.matrix);
      c.witness["projection_equals_product"] = factors_ok;
      c.witness["psi1_automorphism"] = a1.ok();
      c.witness["psi2_automorphism"] = a2.ok();
      c.witness["psi1_isometry"] = iso.ok;
      if (iso.violating_pair) {
        c.witness["isometry_violation"] = {{"pair", pair_json(iso.violating_pair->first, iso.violating_pair->second, Q.get())},
                                           {"expected", rational_to_json(iso.expected)},
                                           {"actual", rational_to_json(iso.actual)}};
      }
      bool inner_ok = false;
      if (a2.ok()) {
        const auto ai = is_almost_inner(psi2, opts.almost_inner_samples, opts.seed);
        inner_ok = ai.verdict == AlmostInnerVerdict::passed_randomized;
        c.witness["psi2_almost_inner"] = to_string(ai.verdict);
        c.witness["psi2_samples"] = ai.checked;
        if (ai.counterexample) c.witness["psi2_counterexample"] = vector_to_json(*ai.counterexample);
      }
      c.ok = factors_ok && a1.ok() && a2.ok() && iso.ok && inner_ok;
      if (!factors_ok) c.detail = "projection differs from psi1 * psi2";
      else if (!a1.ok() || !a2.ok()) c.detail = "a factor is not an automorphism of the quotient";
      else if (!iso.ok) c.detail = "psi1 is not an isometry of the quotient";
      else if (!inner_ok) c.detail = "psi2 is not almost inner";
      else c.detail = "projection = psi1 * psi2 with psi1 isometric and psi2 almost inner (randomized)";
    }
  }

  // (e)
  {
    auto& c = r.quotient_marking;
    const auto g = TwoStepGeometry::build(q.algebra, q.metric);
    c.ok = true;
    int checked = 0;
    double worst = 0;
    json first_bad;
    Window::uniform(lat1.rank(), opts.window).for_each([&](const IVector& e) {
      const QVector x = lat1.word_to_element(e);
      if (is_zero(x)) return;
      const QVector y = phi(x);
      ++checked;
      std::vector<double> p1, p2;
      const QVector qx = q.project(x), qy = q.project(y);
      if (is_zero(qx) || is_zero(qy)) {
        p1 = {std::sqrt(static_cast<double>(metric.norm2(x).to_double()))};
        p2 = {std::sqrt(static_cast<double>(metric.norm2(y).to_double()))};
        if (is_zero(qx) != is_zero(qy)) p2.push_back(-1);
      } else {
        const auto d1 = two_step_periods(g, qx), d2 = two_step_periods(g, qy);
        p1 = {d1.v2.to_double(), d1.z2.to_double()};
        p2 = {d2.v2.to_double(), d2.z2.to_double()};
        for (const auto& l : d1.definite) p1.push_back(l.value());
        for (const auto& l : d2.definite) p2.push_back(l.value());
      }
      double diff = p1.size() == p2.size() ? 0 : INFINITY;
      for (std::size_t i = 0; i < p1.size() && i < p2.size(); ++i) diff = std::max(diff, std::abs(p1[i] - p2[i]));
      worst = std::max(worst, diff);
      if (diff > opts.tolerance && c.ok) {
        c.ok = false;
        first_bad = {{"word", ivector_json(e)}, {"difference", diff}};
      }
    });
    c.witness = {{"checked", checked}, {"max_difference", worst}};
    if (!first_bad.is_null()) c.witness["first_failure"] = first_bad;
    c.detail = c.ok ? "sampled classes have matching period data" : "period data differ on a sampled class";
  }
  return r;
}

json to_json(const MarkingReport& r) {
  auto check = [](const MarkingCheck& c) {
    return json{{"ok", c.ok}, {"ran", c.ran}, {"detail", c.detail}, {"witness", c.witness}};
  };
  return json{{"passed", r.passed()},
              {"certifying", r.certifying},
              {"checks",
               {{"generator_image_ok", check(r.generator_image)},
                {"central_intersection_ok", check(r.central_intersection)},
                {"central_case_ok", check(r.central_case)},
                {"projection_factorization_ok", check(r.projection_factorization)},
                {"quotient_marking_ok", check(r.quotient_marking)}}}};
}

IsometricFactorRefutation refute_isometric_factor(const QMatrix& base, std::size_t z,
                                                  const std::vector<std::size_t>& free, const Metric& m) {
  const std::size_t n = base.cols();
  if (base.rows() != n || z >= n) throw std::invalid_argument("refute_isometric_factor: bad dimensions");
  IsometricFactorRefutation out;
  QMatrix M = base;
  const QVector ez = unit_vector(n, z), mz = base.col(z);
  const Rational lead = m.inner(mz, ez);
  if (lead.is_zero()) {
    out.detail = "the pairs with e_z do not determine the free coefficients";
    return out;
  }
  for (auto i : free) {
    if (i == z) throw std::invalid_argument("refute_isometric_factor: column z cannot be free");
    const Rational t = (m.inner(ez, unit_vector(n, i)) - m.inner(mz, base.col(i))) / lead;
    out.forced.push_back(t);
    M(z, i) += t;
  }
  const auto iso = matrix_isometry(M, m);
  if (iso.ok) {
    out.detail = "the forced candidate is an isometry";
    return out;
  }
  out.refuted = true;
  out.violating_pair = iso.violating_pair;
  out.expected = iso.expected;
  out.actual = iso.actual;
  out.detail = "pair (" + std::to_string(iso.violating_pair->first) + ", " + std::to_string(iso.violating_pair->second) +
               "): <u, v> = " + iso.expected.str() + " but <Mu, Mv> = " + iso.actual.str();
  return out;
}

QMatrix example_II_forced_factor(std::int64_t h1, std::int64_t h3, std::int64_t h4, const std::array<int, 4>& signs) {
  if (h3 == 0 && h4 == 0) throw std::invalid_argument("example_II_forced_factor: h3 and h4 both zero");
  for (int s : signs)
    if (s != 1 && s != -1) throw std::invalid_argument("example_II_forced_factor: signs must be +1 or -1");
  // Basis X1 Y1 Y2 Z of the quotient.
  QMatrix M(4, 4);
  M(0, 0) = signs[0];
  M(1, 0) = Rational(h3, 2);
  M(2, 0) = Rational(h4, 2);
  M(1, 1) = signs[1];
  M(2, 1) = h1;
  M(2, 2) = signs[2];
  M(3, 3) = signs[3];
  return M;
}

}  // namespace nilspec
