#include <gtest/gtest.h>

#include "nilspec/algebra.hpp"
#include "nilspec/catalog.hpp"

using namespace nilspec;

namespace {

QVector e(std::size_t n, std::size_t i, Rational s = 1) { return unit_vector(n, i, s); }

// Independent oracle: span of all brackets by brute force over the tensor.
std::size_t bracket_span_dim(const LieAlgebra& L, const std::vector<QVector>& right) {
  std::vector<QVector> v;
  for (std::size_t i = 0; i < L.dim(); ++i)
    for (const auto& r : right) v.push_back(L.bracket(e(L.dim(), i), r));
  return Subspace::span(L.dim(), v).dim();
}

}  // namespace

TEST(Algebra, BracketTableExampleII) {
  const auto L = example_algebra_II();
  const auto X1 = e(5, 0), Y1 = e(5, 1), Y2 = e(5, 2), Z = e(5, 3), W = e(5, 4);
  EXPECT_EQ(bracket(X1, X1, L), zero_vector(5));
  EXPECT_EQ(bracket(X1, Y1, L), Z);
  EXPECT_EQ(bracket(X1, Z, L), W);
  EXPECT_EQ(bracket(Y1, Y2, L), W);
  EXPECT_EQ(bracket(Y1, X1, L), -Z);
}

TEST(Algebra, BracketDimensionMismatchThrows) {
  const auto L = example_algebra_II();
  EXPECT_THROW(L.bracket(e(4, 0), e(5, 0)), std::invalid_argument);
}

TEST(Algebra, DerivedSeriesExampleII) {
  const auto L = example_algebra_II();
  const auto f = derived_series(L);
  EXPECT_EQ(f.step, 3);
  ASSERT_EQ(f.derived.size(), 2u);
  EXPECT_EQ(f.derived[0], Subspace::span(5, {e(5, 3), e(5, 4)}));
  EXPECT_EQ(f.derived[1], Subspace::span(5, {e(5, 4)}));
  EXPECT_EQ(f.derived[0].dim(), bracket_span_dim(L, Subspace::whole(5).basis()));
}

TEST(Algebra, DerivedSeriesExampleI) {
  const auto L = example_algebra_I();
  const auto f = derived_series(L);
  EXPECT_EQ(f.step, 3);
  EXPECT_EQ(f.term(1), Subspace::span(7, {e(7, 4), e(7, 5), e(7, 6)}));
  EXPECT_EQ(f.term(2), Subspace::span(7, {e(7, 6)}));
  EXPECT_EQ(f.center, Subspace::span(7, {e(7, 6)}));
  EXPECT_EQ(f.term(3).dim(), 0u);
}

TEST(Algebra, AbelianIsStepOne) {
  const auto L = LieAlgebra::from_brackets({"a", "b", "c"}, {});
  const auto f = derived_series(L);
  EXPECT_EQ(f.step, 1);
  EXPECT_TRUE(f.derived.empty());
  EXPECT_EQ(f.center.dim(), 3u);
}

TEST(Algebra, AllExamplesPassStructureChecks) {
  for (const auto& L : {example_algebra_I(), example_algebra_II()}) {
    const auto rep = check_structure(L);
    EXPECT_TRUE(rep.ok());
    const auto f = derived_series(L);
    EXPECT_TRUE(derived_series_compatible(L, f));
  }
}

TEST(Algebra, AntisymmetryViolationReported) {
  std::vector<std::vector<std::vector<Rational>>> c(4, std::vector<std::vector<Rational>>(4, QVector(4)));
  c[1][2][3] = 1;
  c[2][1][3] = 1;
  const auto L = LieAlgebra::from_tensor({"a", "b", "c", "d"}, c);
  const auto rep = check_structure(L);
  ASSERT_EQ(rep.antisymmetry.size(), 1u);
  EXPECT_EQ(rep.antisymmetry[0].i, 1u);
  EXPECT_EQ(rep.antisymmetry[0].j, 2u);
  EXPECT_EQ(rep.antisymmetry[0].k, 3u);
}

TEST(Algebra, PerturbedTensorBreaksJacobi) {
  const auto L = example_algebra_I();
  // Every single-entry perturbation of a pair (i<j) that is checked against a
  // brute-force Jacobiator must agree with the report.
  int perturbations = 0, detected = 0;
  for (const auto& [i, j, k] : std::vector<std::array<std::size_t, 3>>{{0, 1, 4}, {2, 3, 5}, {0, 4, 5}, {1, 2, 6}}) {
    std::vector<BracketTerm> terms;
    for (const auto& t : L.terms())
      if (t.i < t.j) terms.push_back(t);
    terms.push_back({i, j, k, Rational(1)});
    const auto P = LieAlgebra::from_brackets(L.labels(), terms);
    std::size_t brute = 0;
    for (std::size_t a = 0; a < 7; ++a)
      for (std::size_t b = a + 1; b < 7; ++b)
        for (std::size_t d = b + 1; d < 7; ++d) {
          QVector s = P.bracket(e(7, a), P.bracket(e(7, b), e(7, d)));
          s += P.bracket(e(7, b), P.bracket(e(7, d), e(7, a)));
          s += P.bracket(e(7, d), P.bracket(e(7, a), e(7, b)));
          brute += !is_zero(s);
        }
    ++perturbations;
    EXPECT_EQ(check_structure(P).jacobi.size(), brute);
    detected += brute > 0;
  }
  EXPECT_GE(detected, 1);
  EXPECT_EQ(perturbations, 4);
}

TEST(Algebra, StepMismatchFlagged) {
  const auto L = LieAlgebra::from_brackets({"x", "y", "z"}, {{0, 1, 2, Rational(1)}}, 3);
  EXPECT_EQ(L.step(), 2);
  EXPECT_TRUE(check_structure(L).step_mismatch);
}

TEST(Algebra, StrictNonsingularity) {
  EXPECT_EQ(is_strictly_nonsingular(example_algebra_I()).verdict, NonsingularVerdict::passed_randomized);
  EXPECT_EQ(is_strictly_nonsingular(example_algebra_II()).verdict, NonsingularVerdict::passed_randomized);

  const auto ab = LieAlgebra::from_brackets({"a", "b"}, {});
  const auto r = is_strictly_nonsingular(ab);
  EXPECT_EQ(r.verdict, NonsingularVerdict::proven_false);
  EXPECT_TRUE(r.degenerate);

  // Example II algebra plus a one-dimensional abelian summand R.
  std::vector<BracketTerm> terms;
  const auto L2 = example_algebra_II();
  for (const auto& t : L2.terms())
    if (t.i < t.j) terms.push_back(t);
  auto labels = L2.labels();
  labels.push_back("R");
  const auto sum = LieAlgebra::from_brackets(labels, terms);
  const auto rs = is_strictly_nonsingular(sum);
  ASSERT_EQ(rs.verdict, NonsingularVerdict::proven_false);
  ASSERT_TRUE(rs.witness.has_value());
  // Witness is reverified by exact rank.
  const auto f = derived_series(sum);
  EXPECT_FALSE(nonsingular_at(sum, f, *rs.witness));
  EXPECT_FALSE(f.center.contains(*rs.witness));
}

TEST(Algebra, NonsingularityPerBasisVectorExampleI) {
  // Symbolic case analysis on Example I: ad(X)(g) contains W whenever X is noncentral.
  // Each noncentral basis vector reaches W through a single bracket.
  const auto L = example_algebra_I();
  const auto f = derived_series(L);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_TRUE(nonsingular_at(L, f, e(7, i)));
}

TEST(Algebra, MetricFromFrame) {
  const auto m = example_metric_V();
  const auto E = m.frame().row_list();
  for (std::size_t a = 0; a < 7; ++a)
    for (std::size_t b = 0; b < 7; ++b) EXPECT_EQ(m.inner(E[a], E[b]), Rational(a == b ? 1 : 0));
  const auto g = m.gram();
  EXPECT_EQ(g, g.transpose());
  EXPECT_THROW(Metric(QMatrix(2, 2)), std::invalid_argument);
}

TEST(Algebra, AdaptedFrameIdentityMetricExampleI) {
  const auto L = example_algebra_I();
  const auto F = adapted_frame(L, Metric::identity(7));
  ASSERT_EQ(F.J, 4u);
  ASSERT_EQ(F.K, 2u);
  ASSERT_EQ(F.T, 1u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(F.X[i], e(7, i));
  EXPECT_EQ(F.Z[0], e(7, 4));
  EXPECT_EQ(F.Z[1], e(7, 5));
  EXPECT_EQ(F.W[0], e(7, 6));
  // A, B, C read straight off the table.
  EXPECT_EQ(F.a(0, 2, 0), Rational(1));  // [X1,Y1] = Z1
  EXPECT_EQ(F.a(1, 3, 0), Rational(1));  // [X2,Y2] = Z1
  EXPECT_EQ(F.a(0, 3, 1), Rational(1));  // [X1,Y2] = Z2
  EXPECT_EQ(F.a(3, 0, 1), Rational(-1));
  EXPECT_EQ(F.b(2, 3, 0), Rational(1));  // [Y1,Y2] = W
  EXPECT_EQ(F.c(0, 0, 0), Rational(1));  // [X1,Z1] = W
  EXPECT_EQ(F.c(1, 1, 0), Rational(1));  // [X2,Z2] = W
  EXPECT_EQ(F.c(0, 1, 0), Rational(0));
  EXPECT_TRUE(adapted_frame_consistent(L, Metric::identity(7), F));
}

TEST(Algebra, AdaptedFrameAbelian) {
  const auto L = LieAlgebra::from_brackets({"a", "b"}, {});
  const auto F = adapted_frame(L, Metric::identity(2));
  EXPECT_EQ(F.J, 2u);
  EXPECT_EQ(F.K + F.T, 0u);
  EXPECT_TRUE(F.A.empty() && F.B.empty() && F.C.empty());
}

TEST(Algebra, AdaptedFrameExampleV) {
  const auto L = example_algebra_V();
  const auto m = example_metric_V();
  const auto F = adapted_frame(L, m);
  EXPECT_TRUE(adapted_frame_consistent(L, m, F));
  // Cross-check the constants by bilinearity against the structural bracket.
  const auto E = F.frame_matrix().row_list();
  for (std::size_t a = 0; a < 7; ++a)
    for (std::size_t b = 0; b < 7; ++b) {
      QVector rebuilt(7);
      for (std::size_t c = 0; c < 7; ++c) axpy(rebuilt, F.structure(a, b, c), E[c]);
      EXPECT_EQ(rebuilt, L.bracket(E[a], E[b]));
    }
  for (std::size_t i = 0; i < F.J; ++i)
    for (std::size_t j = 0; j < F.J; ++j)
      for (std::size_t k = 0; k < F.K; ++k) EXPECT_EQ(F.a(i, j, k), -F.a(j, i, k));
}

TEST(Algebra, QuotientExampleIII) {
  const auto q = quotient_algebra(example_algebra_I(), Metric::identity(7));
  const auto& Lb = q.algebra;
  ASSERT_EQ(Lb.dim(), 6u);
  EXPECT_EQ(Lb.step(), 2);
  const auto b = [&](std::size_t i, std::size_t j) { return Lb.bracket(e(6, i), e(6, j)); };
  EXPECT_EQ(b(0, 2), e(6, 4));
  EXPECT_EQ(b(1, 3), e(6, 4));
  EXPECT_EQ(b(0, 3), e(6, 5));
  EXPECT_EQ(b(2, 3), zero_vector(6));
  EXPECT_EQ(b(0, 4), zero_vector(6));
  EXPECT_EQ(b(0, 1), zero_vector(6));
  EXPECT_EQ(Lb.terms().size(), 6u);
}

TEST(Algebra, QuotientExampleIV) {
  const auto q = quotient_algebra(example_algebra_II(), Metric::identity(5));
  const auto& Lb = q.algebra;
  ASSERT_EQ(Lb.dim(), 4u);
  EXPECT_EQ(Lb.bracket(e(4, 0), e(4, 1)), e(4, 3));
  EXPECT_EQ(Lb.terms().size(), 2u);
  // Center of the quotient is span{Ybar2, Zbar}: h1 plus a line.
  EXPECT_EQ(derived_series(Lb).center, Subspace::span(4, {e(4, 2), e(4, 3)}));
}

TEST(Algebra, QuotientOfTwoStepIsAbelian) {
  const auto h = LieAlgebra::from_brackets({"x", "y", "z"}, {{0, 1, 2, Rational(1)}});
  const auto q = quotient_algebra(h, Metric::identity(3));
  EXPECT_EQ(q.algebra.dim(), 2u);
  EXPECT_TRUE(q.algebra.terms().empty());
  EXPECT_THROW(quotient_algebra(LieAlgebra::from_brackets({"a"}, {}), Metric::identity(1)), std::invalid_argument);
}

TEST(Algebra, QuotientSectionIsHorizontal) {
  const auto L = example_algebra_V();
  const auto m = example_metric_V();
  const auto q = quotient_algebra(L, m);
  for (std::size_t a = 0; a < q.algebra.dim(); ++a) {
    const auto h = q.lift(e(q.algebra.dim(), a));
    EXPECT_EQ(q.project(h), e(q.algebra.dim(), a));
    for (const auto& k : q.kernel.basis()) EXPECT_TRUE(m.inner(h, k).is_zero());
  }
  // Quotient metric agrees with the restriction to the horizontal space.
  for (std::size_t a = 0; a < q.algebra.dim(); ++a)
    for (std::size_t b = 0; b < q.algebra.dim(); ++b)
      EXPECT_EQ(q.metric.inner(e(6, a), e(6, b)), m.inner(q.lift(e(6, a)), q.lift(e(6, b))));
}
