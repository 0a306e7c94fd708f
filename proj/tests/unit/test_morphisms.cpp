#include <gtest/gtest.h>

#include <random>
#include <set>

#include "nilspec/catalog.hpp"
#include "nilspec/morphisms.hpp"
#include "nilspec/spectra.hpp"

using namespace nilspec;

namespace {

std::shared_ptr<const LieAlgebra> alg(const std::string& name) { return example(name).algebra; }

struct QuotientData {
  Quotient q;
  std::shared_ptr<const LieAlgebra> Q;
};

const QuotientData& quotient_of(const std::string& name) {
  static std::map<std::string, QuotientData> cache;
  auto it = cache.find(name);
  if (it == cache.end()) {
    auto q = quotient_algebra(*alg(name), example(name).metric);
    auto Q = std::make_shared<const LieAlgebra>(q.algebra);
    it = cache.emplace(name, QuotientData{std::move(q), Q}).first;
  }
  return it->second;
}

QVector random_vector(std::mt19937_64& rng, std::size_t n, int den = 2) {
  std::uniform_int_distribution<int> num(-3, 3), d(1, den);
  QVector v(n);
  for (auto& c : v) c = Rational(num(rng), d(rng));
  return v;
}

// Every failing basis pair, straight from the structure constants.
std::set<std::pair<std::size_t, std::size_t>> failing_pairs(const LieAlgebra& L, const QMatrix& M) {
  std::set<std::pair<std::size_t, std::size_t>> out;
  const std::size_t n = L.dim();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        Rational lhs = 0, rhs = 0;
        for (std::size_t l = 0; l < n; ++l) lhs += M(k, l) * L.constant(i, j, l);
        for (std::size_t a = 0; a < n; ++a)
          for (std::size_t b = 0; b < n; ++b) rhs += M(a, i) * M(b, j) * L.constant(a, b, k);
        if (lhs != rhs) out.insert({i, j});
      }
  return out;
}

}  // namespace

TEST(Morphisms, AutomorphismVerdicts) {
  EXPECT_TRUE(is_lie_algebra_automorphism(Morphism::identity(alg("V"))).ok());
  const Morphism phi(alg("V"), *example("V").phi);
  EXPECT_TRUE(is_lie_algebra_automorphism(phi).ok());
  EXPECT_TRUE(failing_pairs(*alg("V"), phi.matrix).empty());

  // Perturb each nonzero coefficient in turn.
  for (std::size_t r = 0; r < 7; ++r)
    for (std::size_t c = 0; c < 7; ++c) {
      if (phi.matrix(r, c).is_zero()) continue;
      QMatrix m = phi.matrix;
      m(r, c) += Rational(1, 3);
      const auto check = is_lie_algebra_automorphism(Morphism(alg("V"), m));
      const auto oracle = failing_pairs(*alg("V"), m);
      EXPECT_EQ(check.violating_pair.has_value(), !oracle.empty());
      if (check.violating_pair) {
        EXPECT_TRUE(oracle.contains(*check.violating_pair));
        EXPECT_EQ(*check.violating_pair, *oracle.begin());
      }
    }
  QMatrix singular = QMatrix::identity(7);
  singular(0, 0) = 0;
  EXPECT_FALSE(is_lie_algebra_automorphism(Morphism(alg("V"), singular)).invertible);
  EXPECT_THROW(Morphism(alg("V"), QMatrix::identity(5)), std::invalid_argument);
}

TEST(Morphisms, ApplyToGroup) {
  const auto L = alg("V");
  const Morphism phi(L, *example("V").phi);
  EXPECT_EQ(apply_to_group(phi, zero_vector(7)), zero_vector(7));
  EXPECT_EQ(apply_to_group(phi, unit_vector(7, 6)), unit_vector(7, 6, -1));
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto x = random_vector(rng, 7), y = random_vector(rng, 7);
    EXPECT_EQ(apply_to_group(phi, bch_product(*L, x, y)),
              bch_product(*L, apply_to_group(phi, x), apply_to_group(phi, y)));
  }
  QMatrix m = phi.matrix;
  m(0, 0) = 2;
  EXPECT_THROW(apply_to_group(Morphism(L, m), unit_vector(7, 0)), std::invalid_argument);
}

TEST(Morphisms, MapsLattice) {
  const auto& ex = example("V");
  const Morphism phi(ex.algebra, *ex.phi);
  EXPECT_TRUE(maps_lattice(Morphism::identity(ex.algebra), ex.lattice1, ex.lattice1).ok);
  EXPECT_TRUE(maps_lattice(phi, ex.lattice1, ex.lattice2).ok);
  const auto back = maps_lattice(phi, ex.lattice1, ex.lattice1);
  EXPECT_FALSE(back.ok);
  // Phi(exp 2X1) has no canonical coordinates in lattice 1.
  EXPECT_FALSE(ex.lattice1.contains(phi(unit_vector(7, 0, 2))));
  EXPECT_FALSE(back.failures.empty());
}

TEST(Morphisms, IsometryOfQuotientFactors) {
  const auto& ex = example("V");
  const auto& qd = quotient_of("V");
  EXPECT_TRUE(is_isometry(Morphism::identity(ex.algebra), ex.metric).ok);
  const Morphism psi1(qd.Q, *ex.psi1), psi2(qd.Q, *ex.psi2);
  EXPECT_TRUE(is_isometry(psi1, qd.q.metric).ok);
  // psi1 sends each projected frame vector to plus or minus itself.
  for (const auto& e : qd.q.metric.frame().row_list()) {
    const auto img = psi1(e);
    EXPECT_TRUE(img == e || img == -e);
  }
  const auto iso2 = is_isometry(psi2, qd.q.metric);
  EXPECT_FALSE(iso2.ok);
  // (*) on (X2, Z1).
  const auto x2 = unit_vector(6, 1), z1 = unit_vector(6, 4);
  EXPECT_NE(qd.q.metric.inner(psi2(x2), psi2(z1)), qd.q.metric.inner(x2, z1));
}

TEST(Morphisms, InnerAutomorphismsAreAlmostInner) {
  std::mt19937_64 rng(5);
  for (const auto* name : {"II", "V"}) {
    const auto L = alg(name);
    for (int trial = 0; trial < 5; ++trial) {
      const auto a = random_vector(rng, L->dim());
      const auto M = inner_automorphism(L, a);
      EXPECT_TRUE(is_lie_algebra_automorphism(M).ok());
      // Matches group conjugation.
      for (int s = 0; s < 5; ++s) {
        const auto x = random_vector(rng, L->dim());
        EXPECT_EQ(M(x), conjugate(*L, a, x));
      }
      const auto r = is_almost_inner(M, 50, trial);
      EXPECT_EQ(r.verdict, AlmostInnerVerdict::passed_randomized);
      ASSERT_TRUE(r.constant_witness.has_value());
      for (const auto& w : r.witnesses) EXPECT_EQ(conjugate(*L, *r.constant_witness, w.x), M(w.x));
    }
  }
  EXPECT_FALSE(inner_witness(Morphism(alg("V"), *example("V").phi)).has_value());
}

TEST(Morphisms, AlmostInnerQuotientMaps) {
  const auto& ex = example("V");
  const auto& qd = quotient_of("V");
  const auto r = is_almost_inner(Morphism(qd.Q, *ex.psi2), 300, 3);
  EXPECT_EQ(r.verdict, AlmostInnerVerdict::passed_randomized);
  EXPECT_GT(r.checked, 300);
  for (const auto& w : r.witnesses) EXPECT_EQ(conjugate(*qd.Q, w.a, w.x), *ex.psi2 * w.x);

  // X2 -> X2 + Z1 on the example III quotient: [x, g] contains Z1 whenever x has an X2 component.
  const auto& q3 = quotient_of("III");
  QMatrix shear = QMatrix::identity(6);
  shear(4, 1) = 1;
  const Morphism sh(q3.Q, shear);
  ASSERT_TRUE(is_lie_algebra_automorphism(sh).ok());
  EXPECT_EQ(is_almost_inner(sh, 300, 4).verdict, AlmostInnerVerdict::passed_randomized);

  // A dilation moves X1 off its G-class.
  QMatrix dil = QMatrix::identity(6);
  dil(0, 0) = dil(1, 1) = dil(4, 4) = dil(5, 5) = 2;
  const Morphism d(q3.Q, dil);
  ASSERT_TRUE(is_lie_algebra_automorphism(d).ok());
  const auto bad = is_almost_inner(d);
  ASSERT_EQ(bad.verdict, AlmostInnerVerdict::proven_false);
  // Oracle: two-step conjugates of x are x + [a, x], so y - x must be in the image of ad x.
  const auto x = *bad.counterexample, y = *bad.counterexample_image;
  EXPECT_FALSE(solve(q3.Q->ad(x), y - x).has_value());
}

TEST(Morphisms, GammaAlmostInner) {
  const auto& ex1 = example("I");
  // The word correspondence of example I.
  const auto r = is_gamma_almost_inner(
      ex1.lattice1, [&](const IVector& e) { return ex1.lattice2.word_to_element(e); }, Window::uniform(7, 1));
  EXPECT_EQ(r.verdict, AlmostInnerVerdict::passed_randomized);
  EXPECT_EQ(r.checked, 2187);
  // Extended linearly, the same correspondence is not an automorphism.
  QMatrix lin = QMatrix::identity(7);
  lin(5, 3) = Rational(1, 2);
  EXPECT_FALSE(is_lie_algebra_automorphism(Morphism(ex1.algebra, lin)).ok());

  // Conjugate in G means equal period data downstairs.
  const auto& qd = quotient_of("I");
  const auto g = TwoStepGeometry::build(qd.q.algebra, qd.q.metric);
  int compared = 0;
  for (const auto& w : r.witnesses) {
    const auto a = qd.q.project(w.x), b = qd.q.project(ex1.lattice2.word_to_element(w.word));
    if (is_zero(a)) {
      EXPECT_TRUE(is_zero(b));
      continue;
    }
    const auto d1 = two_step_periods(g, a), d2 = two_step_periods(g, b);
    EXPECT_EQ(d1.v2, d2.v2);
    EXPECT_EQ(d1.z2, d2.z2);
    ASSERT_EQ(d1.definite.size(), d2.definite.size());
    for (std::size_t i = 0; i < d1.definite.size(); ++i) EXPECT_EQ(d1.definite[i], d2.definite[i]);
    ++compared;
  }
  EXPECT_GT(compared, 2000);

  // Inner automorphism by a lattice element: constant witness.
  const auto gamma = ex1.lattice1.word_to_element(IVector{1, 0, -1, 0, 1, 0, 0});
  const auto inner = inner_automorphism(ex1.algebra, gamma);
  EXPECT_TRUE(maps_lattice(inner, ex1.lattice1, ex1.lattice1).ok);
  const auto ri = is_gamma_almost_inner(inner, ex1.lattice1, Window::uniform(7, 1));
  EXPECT_EQ(ri.verdict, AlmostInnerVerdict::passed_randomized);
  ASSERT_TRUE(ri.constant_witness.has_value());
  EXPECT_EQ(inner_automorphism(ex1.algebra, *ri.constant_witness).matrix, inner.matrix);
}

TEST(Morphisms, AlmostInnerImpliesGammaAlmostInner) {
  const auto& ex = example("III");
  const auto& qd = quotient_of("III");
  const auto lat = project_lattice(ex.lattice1, qd.q, qd.Q);
  QMatrix shear = QMatrix::identity(6);
  shear(4, 1) = 1;
  std::mt19937_64 rng(8);
  std::vector<Morphism> maps{Morphism(qd.Q, shear), inner_automorphism(qd.Q, random_vector(rng, 6))};
  for (const auto& M : maps) {
    ASSERT_EQ(is_almost_inner(M, 100).verdict, AlmostInnerVerdict::passed_randomized);
    EXPECT_EQ(is_gamma_almost_inner(M, lat, Window::uniform(6, 1)).verdict, AlmostInnerVerdict::passed_randomized);
  }
}

TEST(Morphisms, ProjectMorphism) {
  const auto& ex = example("V");
  const auto& qd = quotient_of("V");
  const Morphism phi(ex.algebra, *ex.phi);
  EXPECT_EQ(project_morphism(Morphism::identity(ex.algebra), qd.q, qd.Q).matrix, QMatrix::identity(6));
  EXPECT_EQ(project_morphism(phi, qd.q, qd.Q).matrix, *ex.psi1 * *ex.psi2);

  std::mt19937_64 rng(21);
  std::vector<Morphism> autos{phi};
  for (int i = 0; i < 3; ++i) autos.push_back(inner_automorphism(ex.algebra, random_vector(rng, 7)));
  for (const auto& a : autos)
    for (const auto& b : autos)
      EXPECT_EQ(project_morphism(compose(a, b), qd.q, qd.Q).matrix,
                project_morphism(a, qd.q, qd.Q).matrix * project_morphism(b, qd.q, qd.Q).matrix);
  // Inner projects to inner by the projected element.
  const auto a = random_vector(rng, 7);
  EXPECT_EQ(project_morphism(inner_automorphism(ex.algebra, a), qd.q, qd.Q).matrix,
            inner_automorphism(qd.Q, qd.q.project(a)).matrix);

  QMatrix swap = QMatrix::identity(7);
  swap(0, 0) = swap(6, 6) = 0;
  swap(0, 6) = swap(6, 0) = 1;
  EXPECT_THROW(project_morphism(Morphism(ex.algebra, swap), qd.q, qd.Q), std::invalid_argument);
}

TEST(Morphisms, VerifyMarkingIdentity) {
  const auto& ex = example("III");
  const auto r = verify_marking(Morphism::identity(ex.algebra), ex.lattice1, ex.lattice1, ex.metric,
                                Factorization{QMatrix::identity(6), QMatrix::identity(6)});
  EXPECT_TRUE(r.passed());
}

TEST(Morphisms, VerifyMarkingExampleV) {
  const auto& ex = example("V");
  const Morphism phi(ex.algebra, *ex.phi);
  const auto r = verify_marking(phi, ex.lattice1, ex.lattice2, ex.metric, Factorization{*ex.psi1, *ex.psi2});
  EXPECT_TRUE(r.generator_image.ok) << r.generator_image.detail;
  EXPECT_TRUE(r.central_intersection.ok);
  EXPECT_TRUE(r.central_case.ok);
  EXPECT_EQ(r.central_case.witness[0]["case"], "inverted");
  EXPECT_TRUE(r.projection_factorization.ok) << r.projection_factorization.detail;
  EXPECT_TRUE(r.quotient_marking.ok) << to_json(r).dump();
  EXPECT_TRUE(r.passed());
  const auto j = to_json(r);
  EXPECT_TRUE(j["passed"].get<bool>());
  EXPECT_TRUE(j["checks"].contains("quotient_marking_ok"));

  const auto partial = verify_marking(phi, ex.lattice1, ex.lattice2, ex.metric, std::nullopt);
  EXPECT_FALSE(partial.certifying);
  EXPECT_FALSE(partial.passed());
  EXPECT_FALSE(partial.projection_factorization.ran);
  EXPECT_TRUE(partial.generator_image.ok && partial.central_case.ok && partial.quotient_marking.ok);

  // A full pass goes with identical multiplicity tables.
  const SpectrumContext a(ex.lattice1, ex.metric), b(ex.lattice2, ex.metric);
  const auto rep = compare_length_spectra(a, b, LengthWindow::parse(ex.expected.lambda_window));
  for (const auto& row : rep.rows) {
    EXPECT_EQ(row.first.m_prime, row.second.m_prime) << row.lambda.expr;
    EXPECT_EQ(row.first.m_dprime, row.second.m_dprime) << row.lambda.expr;
  }
}

TEST(Morphisms, VerifyMarkingRejectsWrongFactors) {
  const auto& ex = example("V");
  const Morphism phi(ex.algebra, *ex.phi);
  // Swapped order: the product no longer equals the projection, or psi2 is not isometric.
  const auto r = verify_marking(phi, ex.lattice1, ex.lattice2, ex.metric, Factorization{*ex.psi2, *ex.psi1});
  EXPECT_FALSE(r.projection_factorization.ok);
  EXPECT_FALSE(r.passed());
  // Wrong target lattice.
  const auto r2 = verify_marking(phi, ex.lattice1, ex.lattice1, ex.metric, Factorization{*ex.psi1, *ex.psi2});
  EXPECT_FALSE(r2.generator_image.ok);
}

TEST(Morphisms, ExampleIICandidatesRefuted) {
  const auto& ex = example("II");
  const auto& qd = quotient_of("II");
  // One concrete member of the family: h4 = 1, other parameters zero, all signs +.
  const auto L = ex.algebra;
  QMatrix m = QMatrix::identity(5);
  m(2, 0) = Rational(1, 2);  // X1 -> X1 + Y2/2
  m(3, 1) = Rational(1, 2);  // Y1 -> Y1 + Z/2
  const Morphism psi(L, m);
  ASSERT_TRUE(is_lie_algebra_automorphism(psi).ok());
  EXPECT_TRUE(maps_lattice(psi, ex.lattice1, ex.lattice2).ok);
  const auto bar = project_morphism(psi, qd.q, qd.Q);
  const auto r = verify_marking(psi, ex.lattice1, ex.lattice2, ex.metric, Factorization{bar.matrix, QMatrix::identity(4)});
  EXPECT_TRUE(r.generator_image.ok);
  EXPECT_FALSE(r.projection_factorization.ok);
  EXPECT_FALSE(r.projection_factorization.witness["psi1_isometry"].get<bool>());
  EXPECT_FALSE(r.passed());

  // The forced isometric factor for any parameters with h3^2 + h4^2 != 0.
  for (std::int64_t h1 = -1; h1 <= 1; ++h1)
    for (std::int64_t h3 = -2; h3 <= 2; ++h3)
      for (std::int64_t h4 = -2; h4 <= 2; ++h4) {
        if (h3 == 0 && h4 == 0) continue;
        for (int s = 0; s < 16; ++s) {
          const std::array<int, 4> signs{s & 1 ? -1 : 1, s & 2 ? -1 : 1, s & 4 ? -1 : 1, s & 8 ? -1 : 1};
          const auto ref = refute_isometric_factor(example_II_forced_factor(h1, h3, h4, signs), 3, {0, 1, 2}, qd.q.metric);
          ASSERT_TRUE(ref.refuted);
          // Orthonormal metric: the Z multiples are forced to zero, then |image of X1|^2 = 1 + (h3^2 + h4^2)/4.
          for (const auto& t : ref.forced) EXPECT_TRUE(t.is_zero());
          EXPECT_NE(ref.actual, ref.expected);
        }
      }
  EXPECT_THROW(example_II_forced_factor(0, 0, 0, {1, 1, 1, 1}), std::invalid_argument);
  // Without the shear the forced factor is an isometry.
  const auto ok = refute_isometric_factor(QMatrix::identity(4), 3, {0, 1, 2}, qd.q.metric);
  EXPECT_FALSE(ok.refuted);
}
