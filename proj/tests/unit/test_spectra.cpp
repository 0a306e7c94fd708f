#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "nilspec/catalog.hpp"
#include "nilspec/spectra.hpp"

using namespace nilspec;

namespace {

QVector coords(const LieAlgebra& L, const std::vector<std::pair<std::string, Rational>>& parts) {
  QVector v(L.dim());
  for (const auto& [label, c] : parts) v[*L.index_of(label)] += c;
  return v;
}

const SpectrumContext& context(const std::string& name, int which) {
  static std::map<std::pair<std::string, int>, std::unique_ptr<SpectrumContext>> cache;
  auto& slot = cache[{name, which}];
  if (!slot) {
    const auto& ex = example(name);
    slot = std::make_unique<SpectrumContext>(which == 1 ? ex.lattice1 : ex.lattice2, ex.metric);
  }
  return *slot;
}

PiPoly pp(const std::string& s) { return PiPoly::parse(s); }

}  // namespace

TEST(Spectra, PiPolyArithmeticAndParsing) {
  EXPECT_EQ(pp("4*pi*(7-pi)"), pp("28*pi - 4*pi^2"));
  EXPECT_EQ(pp("0.25"), PiPoly(Rational(1, 4)));
  EXPECT_EQ(pp("π"), PiPoly::pi());
  EXPECT_EQ(pp("-(1/2)*pi^2 + 3"), PiPoly(3) - PiPoly(Rational(1, 2)) * PiPoly::pi() * PiPoly::pi());
  EXPECT_EQ(pp("28*pi-4*pi^2").str(), "28*pi-4*pi^2");
  EXPECT_EQ(PiPoly::parse(pp("1/3 - pi/2 + 7*pi^3").str()), pp("1/3 - pi/2 + 7*pi^3"));
  EXPECT_EQ(pp("pi - 3").sign(), 1);
  EXPECT_EQ(pp("pi - 3.1416").sign(), -1);
  // 355/113 agrees with pi to 2.7e-7.
  EXPECT_EQ(pp("355/113 - pi").sign(), 1);
  EXPECT_EQ(pp("0").sign(), 0);
  EXPECT_TRUE(pp("2*pi") < pp("7"));
  for (const auto* bad : {"", "pi +", "1/pi", "1/0", "2^x", "sqrt(2)", "(1", "1 2", "abc"})
    EXPECT_THROW(PiPoly::parse(bad), std::invalid_argument) << bad;
}

TEST(Spectra, LengthParsing) {
  const auto a = Length::parse("sqrt(4*pi*(7-pi))");
  EXPECT_EQ(a.square, pp("28*pi-4*pi^2"));
  EXPECT_NEAR(a.value(), std::sqrt(4 * std::numbers::pi * (7 - std::numbers::pi)), 1e-12);
  EXPECT_EQ(Length::parse("3").square, PiPoly(9));
  EXPECT_EQ(Length::parse("sqrt(2) ").square, PiPoly(2));
  // An inner sqrt is not a whole-expression sqrt.
  EXPECT_THROW(Length::parse("sqrt(2)*sqrt(2)"), std::invalid_argument);
  EXPECT_THROW(Length::parse("-1"), std::invalid_argument);
  EXPECT_THROW(Length::parse("sqrt(-1)"), std::invalid_argument);
  EXPECT_EQ(Length::from_square(PiPoly(Rational(9, 4))).expr, "3/2");
  EXPECT_EQ(Length::from_square(PiPoly(5)).expr, "sqrt(5)");
  const auto w = LengthWindow::parse("0.5..sqrt(13)");
  EXPECT_EQ(w.lo.square, PiPoly(Rational(1, 4)));
  EXPECT_EQ(w.hi.square, PiPoly(13));
  EXPECT_THROW(LengthWindow::parse("3..2"), std::invalid_argument);
  EXPECT_THROW(LengthWindow::parse("3"), std::invalid_argument);
}

TEST(Spectra, HeisenbergCentralLengths) {
  auto squares = [](const std::vector<Length>& v) {
    std::vector<PiPoly> out;
    for (const auto& l : v) out.push_back(l.square);
    return out;
  };
  EXPECT_EQ(squares(heisenberg_central_lengths(1)), std::vector<PiPoly>{PiPoly(1)});
  EXPECT_EQ(squares(heisenberg_central_lengths(7)), (std::vector<PiPoly>{PiPoly(49), pp("4*pi*(7-pi)")}));
  EXPECT_EQ(squares(heisenberg_central_lengths(13)),
            (std::vector<PiPoly>{PiPoly(169), pp("4*pi*(13-pi)"), pp("8*pi*(13-2*pi)")}));
  // k-range by direct inequality k < c / (2 pi).
  for (int c = 1; c <= 40; ++c) {
    int count = 0;
    for (int k = 1; k < 100; ++k)
      if (k < c / (2 * std::numbers::pi)) ++count;
    EXPECT_EQ(heisenberg_central_lengths(c).size(), static_cast<std::size_t>(count + 1)) << c;
  }
  EXPECT_THROW(heisenberg_central_lengths(0), std::invalid_argument);
}

TEST(Spectra, TwoStepGeometryOfQuotients) {
  const auto& g3 = context("III", 1).two_step();
  EXPECT_FALSE(g3.heisenberg_type());
  EXPECT_EQ(g3.bracket_norm2, Rational(6));
  const auto& g4 = context("IV", 1).two_step();
  EXPECT_TRUE(g4.heisenberg_type());
  EXPECT_EQ(g4.theta2, Rational(1));
  EXPECT_EQ(g4.gap2(), pp("4*pi^2"));

  // Oracle for S: orthonormal basis of v, sum of squared brackets.
  for (const auto* name : {"I", "II", "III", "IV", "V"}) {
    const auto& g = context(name, 1).two_step();
    const auto onb = orthonormal_basis(g.v, g.metric);
    Rational s = 0;
    for (const auto& a : onb)
      for (const auto& b : onb) s += g.metric.norm2(g.algebra.bracket(a, b));
    EXPECT_EQ(s, g.bracket_norm2) << name;
  }
}

TEST(Spectra, TwoStepPeriodsExampleIII) {
  const auto& ctx = context("III", 1);
  const auto& g = ctx.two_step();
  const auto& q = ctx.quotient();
  const auto& L = *example("III").algebra;
  auto data = [&](const QVector& x) { return two_step_periods(g, q.project(x)); };

  // Y2 + k1 Z1 + k2 Z2: Z** = 0 and 1 is a period.
  for (int k1 = -2; k1 <= 2; ++k1)
    for (int k2 = -2; k2 <= 2; ++k2) {
      const auto d = data(coords(L, {{"Y2", 1}, {"Z1", k1}, {"Z2", k2}}));
      EXPECT_TRUE(is_zero(d.Zss));
      EXPECT_EQ(d.v2, Rational(1));
      EXPECT_EQ(decide_period(g, d, PiPoly(1)).verdict, Verdict::yes);
    }
  // Y1 + k2 Z2 with k2 != 0: Z** != 0 and 1 is not a period.
  for (int k2 : {-2, -1, 1, 2}) {
    const auto d = data(coords(L, {{"Y1", 1}, {"Z2", k2}}));
    EXPECT_FALSE(is_zero(d.Zss));
    EXPECT_FALSE(d.min_is_period);
    EXPECT_EQ(decide_period(g, d, PiPoly(1)).verdict, Verdict::no);
    EXPECT_EQ(decide_period(g, d, PiPoly(1 + k2 * k2)).verdict, Verdict::yes);
  }
  // Central: V* = 0 and the definite period is |Z*|.
  const auto d = data(coords(L, {{"Z1", 3}, {"Z2", 4}}));
  EXPECT_TRUE(is_zero(d.V));
  ASSERT_FALSE(d.definite.empty());
  EXPECT_EQ(d.definite.back().square, PiPoly(25));
  EXPECT_THROW(data(QVector(7)), std::invalid_argument);
}

TEST(Spectra, TwoStepPeriodInvariants) {
  std::mt19937_64 rng(29);
  std::uniform_int_distribution<int> num(-3, 3);
  for (const auto* name : {"I", "II", "III", "IV", "V"}) {
    const auto& g = context(name, 1).two_step();
    for (int trial = 0; trial < 40; ++trial) {
      QVector x(g.algebra.dim());
      for (auto& c : x) c = Rational(num(rng), 1 + trial % 2);
      if (is_zero(x)) continue;
      const auto d = two_step_periods(g, x);
      EXPECT_EQ(d.V + d.Z, x);
      EXPECT_TRUE(g.center.contains(d.Z));
      for (std::size_t i = 0; i < g.algebra.dim(); ++i)
        EXPECT_TRUE(g.metric.inner(d.Zss, g.algebra.bracket(d.V, g.algebra.basis_vector(i))).is_zero());
      // (2): |V*| is a period iff Z** = 0.
      if (!d.v2.is_zero())
        EXPECT_EQ(decide_period(g, d, PiPoly(d.v2)).verdict == Verdict::yes, d.z2.is_zero()) << name;
      // (3) always, (1) as exclusion.
      EXPECT_EQ(decide_period(g, d, PiPoly(d.v2 + d.z2)).verdict, Verdict::yes);
      for (const auto& l : d.definite) {
        EXPECT_TRUE(PiPoly(d.v2) <= l.square);
        EXPECT_TRUE(l.square <= PiPoly(d.v2 + d.z2));
      }
      if (!d.v2.is_zero()) EXPECT_EQ(decide_period(g, d, PiPoly(d.v2) * PiPoly(Rational(1, 2))).verdict, Verdict::no);
      EXPECT_EQ(decide_period(g, d, PiPoly(d.v2 + d.z2 + 1)).verdict, Verdict::no);
    }
  }
}

TEST(Spectra, RotationBoundBelowHeisenbergLengths) {
  // Every intermediate Heisenberg length must respect the derived bound sqrt(8 pi^2 / S).
  const auto& g = context("IV", 1).two_step();
  const auto gap = *g.gap2();
  for (int c = 1; c <= 60; ++c) {
    const auto ls = heisenberg_central_lengths(c);
    for (std::size_t i = 1; i < ls.size(); ++i) EXPECT_TRUE(gap <= ls[i].square) << c << " " << ls[i].expr;
  }
  // The first one, at c = 2 pi + epsilon, approaches the bound.
  const auto first = heisenberg_central_lengths(7)[1];
  EXPECT_LT(std::abs(first.square.value() - gap.value()) / gap.value(), 0.25);
}

TEST(Spectra, TransferPeriodExampleIV) {
  const auto& ex = example("IV");
  const auto& ctx = context("IV", 1);
  const auto lam = Length::parse("sqrt(4*pi*(7-pi))");
  const auto& lat = ex.lattice1;
  // Only exp(+-7Z) exp(jW) carries this length among small words.
  Window::uniform(lat.rank(), 2).for_each([&](const IVector& e) {
    IVector g = e;
    g[3] *= 4;  // reach k = +-8 around 7
    const bool central = g[0] == 0 && g[1] == 0 && g[2] == 0 && g[3] == 0;
    if (central) return;
    const auto v = transfer_period(ctx, g, lam).verdict;
    EXPECT_EQ(v, Verdict::no) << g[0] << g[1] << g[2] << g[3];
  });
  for (int j = -3; j <= 3; ++j)
    for (int s : {-7, 7}) EXPECT_EQ(transfer_period(ctx, {0, 0, 0, s, j}, lam).verdict, Verdict::yes);
}

TEST(Spectra, TransferPeriodExampleIII) {
  const auto& ex = example("III");
  const auto& ctx = context("III", 1);
  const auto c = ex.lattice1.coordinates(
      bch_product(*ex.algebra, coords(*ex.algebra, {{"Y2", 1}}), coords(*ex.algebra, {{"Z1", 1}})));
  ASSERT_TRUE(c.has_value());
  EXPECT_EQ(transfer_period(ctx, *c, Length::parse("1")).verdict, Verdict::yes);
  // |V*| > lambda excludes.
  EXPECT_EQ(transfer_period(ctx, *c, Length::parse("1/2")).verdict, Verdict::no);
}

TEST(Spectra, CentralWitness) {
  const auto& ex = example("I");
  const Geometry g(*ex.algebra, ex.metric);
  const auto w1 = central_period_witness(g, *ex.algebra, ex.metric, coords(*ex.algebra, {{"W", 1}}));
  EXPECT_EQ(w1.lambda.square, PiPoly(1));
  EXPECT_LT(w1.certificate.residual_translation, 1e-9);
  const auto w3 = central_period_witness(g, *ex.algebra, ex.metric, coords(*ex.algebra, {{"W", -3}}));
  EXPECT_EQ(w3.lambda.square, PiPoly(9));
  EXPECT_LT(w3.certificate.residual_translation, 1e-9);
  EXPECT_THROW(central_period_witness(g, *ex.algebra, ex.metric, QVector(7)), std::invalid_argument);
  EXPECT_THROW(central_period_witness(g, *ex.algebra, ex.metric, coords(*ex.algebra, {{"X1", 1}})),
               std::invalid_argument);
}

TEST(Spectra, ExampleIVMultiplicity) {
  const auto lam = Length::parse("sqrt(4*pi*(7-pi))");
  const auto e1 = multiplicity_at(context("IV", 1), lam);
  const auto e2 = multiplicity_at(context("IV", 2), lam);
  EXPECT_EQ(e1.m_prime, 28);
  EXPECT_EQ(e2.m_prime, 14);
  EXPECT_EQ(e1.m_dprime, 0);
  EXPECT_EQ(e1.completeness, Completeness::complete_for_structured_cases);
  EXPECT_TRUE(e1.window_certified && e2.window_certified);
  std::set<IVector> w(e1.witnesses.begin(), e1.witnesses.end());
  EXPECT_EQ(w, (std::set<IVector>{{0, 0, 0, 7, 0}, {0, 0, 0, -7, 0}}));

  // Oracle: brute-force partition of the same elements.
  const auto pred = [](const IVector& g) { return g[0] == 0 && g[1] == 0 && g[2] == 0 && (g[3] == 7 || g[3] == -7); };
  const Window win{{0, 0, 0, 7, 8}};
  EXPECT_EQ(enumerate_classes(example("IV").lattice1, win, pred).classes.size(), 28u);
  EXPECT_EQ(enumerate_classes(example("IV").lattice2, win, pred).classes.size(), 14u);
}

TEST(Spectra, ExampleIIIUnitLengthCases) {
  const auto& ex = example("III");
  const auto& L = *ex.algebra;
  const auto one = Length::parse("1");
  struct Tally {
    std::int64_t total = 0, c1 = 0, c2 = 0, c3 = 0;
  };
  auto tally = [&](int which) {
    const auto& ctx = context("III", which);
    const auto e = multiplicity_at(ctx, one);
    EXPECT_TRUE(e.window_certified);
    EXPECT_EQ(e.completeness, Completeness::complete_for_structured_cases);
    Tally t;
    t.total = e.m_prime;
    const auto top = ctx.lattice().layer(0), mid = ctx.lattice().layer(1);
    for (const auto& w : e.witnesses) {
      const QVector x = ctx.lattice().word_to_element(w);
      if (L.filtration().center.contains(x)) continue;
      IVector tt(w.begin() + top.first, w.begin() + top.second), kk(w.begin() + mid.first, w.begin() + mid.second);
      const auto n = ctx.bottom_count(tt, kk);
      if (x[*L.index_of("X1")] != 0 || x[*L.index_of("Y2")] != 0) t.c1 += n;
      else if (x[*L.index_of("X2")] != 0 || x[*L.index_of("Y1")] != 0) t.c2 += n;
      else t.c3 += n;
    }
    return t;
  };
  const auto a = tally(1), b = tally(2);
  EXPECT_EQ(a.c1, 8);
  EXPECT_EQ(b.c1, 8);
  EXPECT_EQ(a.c2, 4);
  EXPECT_EQ(b.c2, 4);
  EXPECT_EQ(a.c3, 2 * b.c3);
  EXPECT_EQ(a.total, 20);
  EXPECT_EQ(b.total, 16);

  // Oracle: brute-force class partition of every window element with period 1,
  // the period decided from the quotient by direct linear algebra.
  for (int which : {1, 2}) {
    const Lattice& lat = which == 1 ? ex.lattice1 : ex.lattice2;
    const auto q = quotient_algebra(L, ex.metric);
    const auto& Q = q.algebra;
    const auto vspace = Subspace::span(Q.dim(), {Q.basis_vector(0), Q.basis_vector(1), Q.basis_vector(2), Q.basis_vector(3)});
    auto has_unit_period = [&](const IVector& e) {
      const QVector x = q.project(lat.word_to_element(e));
      if (is_zero(x)) return false;
      const QVector V = orthogonal_projection(x, vspace, q.metric), Z = x - V;
      const Rational v2 = q.metric.norm2(V);
      if (v2 > Rational(1)) return false;
      std::vector<QVector> img;
      for (std::size_t i = 0; i < Q.dim(); ++i) img.push_back(Q.bracket(V, Q.basis_vector(i)));
      const auto span = Subspace::span(Q.dim(), img);
      const QVector Zss = span.dim() ? Z - orthogonal_projection(Z, span, q.metric) : Z;
      const Rational z2 = q.metric.norm2(Zss);
      // Intermediate periods would need length >= 2 pi / sqrt(3) > 1.
      return (v2 == Rational(1) && z2.is_zero()) || v2 + z2 == Rational(1);
    };
    const auto cands = [&](int s) {
      std::vector<IVector> out;
      Window::uniform(4, s).for_each([&](const IVector& t) {
        IVector e(lat.rank(), 0);
        std::copy(t.begin(), t.end(), e.begin());
        // Quick |V|^2 <= 1 screen on the top part alone.
        const QVector x = q.project(lat.word_to_element(e));
        if (q.metric.norm2(orthogonal_projection(x, vspace, q.metric)) > Rational(1)) return;
        Window{{3 * s, 3 * s, 4 * s}}.for_each([&](const IVector& kj) {
          e[4] = kj[0];
          e[5] = kj[1];
          e[6] = kj[2];
          if (has_unit_period(e)) out.push_back(e);
        });
      });
      return out;
    };
    const auto explore = [](int s) { return Window{{2 * s, 2 * s, 2 * s, 2 * s, 6 * s, 6 * s, 8 * s}}; };
    const auto en = enumerate_classes(lat, cands, explore, 1);
    EXPECT_TRUE(en.certified);
    EXPECT_EQ(static_cast<std::int64_t>(en.classes.size()), which == 1 ? a.total : b.total);
  }
}

TEST(Spectra, ExampleIIIQuotientHasNoIntermediateUnitPeriods) {
  const auto gap = *context("III", 1).two_step().gap2();
  EXPECT_TRUE(PiPoly(1) < gap);
}

TEST(Spectra, CentralMultiplicitiesAgreeForAllPairs) {
  for (const auto& name : example_names()) {
    const auto& ex = example(name);
    const auto& a = context(name, 1);
    const auto& b = context(name, 2);
    // Same central intersection.
    auto up_to_sign = [](QVector v) {
      const auto nz = std::find_if(v.begin(), v.end(), [](const Rational& c) { return !c.is_zero(); });
      if (nz != v.end() && *nz < Rational(0))
        for (auto& c : v) c = -c;
      return v;
    };
    std::set<QVector> ca, cb;
    for (const auto& e : ex.lattice1.central_basis()) ca.insert(up_to_sign(ex.lattice1.word_to_element(e)));
    for (const auto& e : ex.lattice2.central_basis()) cb.insert(up_to_sign(ex.lattice2.word_to_element(e)));
    ASSERT_EQ(ca, cb) << name;
    const auto rep = compare_length_spectra(a, b, LengthWindow::parse(ex.expected.lambda_window));
    EXPECT_TRUE(rep.central_columns_equal) << name;
    for (const auto& row : rep.rows) {
      EXPECT_EQ(row.first.m_dprime, row.second.m_dprime) << name << " " << row.lambda.expr;
      EXPECT_TRUE(row.first.window_certified && row.second.window_certified) << name;
    }
  }
}

TEST(Spectra, ExampleIIClassCountsAgree) {
  const auto samples = sample_class_counts(context("II", 1), context("II", 2), 60, 5);
  ASSERT_EQ(samples.size(), 60u);
  int positive = 0;
  for (const auto& s : samples) {
    EXPECT_EQ(s.first, s.second);
    positive += s.first > 0;
  }
  EXPECT_GT(positive, 40);
  const auto rep = compare_length_spectra(context("II", 1), context("II", 2), LengthWindow::parse("0..3"));
  EXPECT_EQ(rep.same_length_spectrum(), "yes");
  for (const auto& row : rep.rows) {
    EXPECT_EQ(row.first.m_prime, row.second.m_prime) << row.lambda.expr;
    EXPECT_EQ(row.first.m_dprime, row.second.m_dprime) << row.lambda.expr;
  }
}

TEST(Spectra, ClassesInGClassMatchBruteForce) {
  // exp(7Z) in example IV: G-conjugates are exp(7Z + sW).
  const auto& ex = example("IV");
  const auto x = coords(*ex.algebra, {{"Z", 7}});
  EXPECT_EQ(classes_in_G_class(context("IV", 1), x), 14);
  EXPECT_EQ(classes_in_G_class(context("IV", 2), x), 7);
  // Not a lattice class at all.
  EXPECT_EQ(classes_in_G_class(context("IV", 1), coords(*ex.algebra, {{"X1", Rational(1, 3)}})), 0);
  // Central elements are their own classes.
  EXPECT_EQ(classes_in_G_class(context("IV", 1), ex.lattice1.generators().back()), 1);

  // General oracle: partition every window element G-conjugate to x.
  const auto& ex2 = example("II");
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> d(-1, 1);
  for (int which : {1, 2}) {
    const Lattice& lat = which == 1 ? ex2.lattice1 : ex2.lattice2;
    const auto& ctx = context("II", which);
    for (int trial = 0; trial < 4; ++trial) {
      IVector e(5);
      for (auto& c : e) c = d(rng);
      if (e[0] == 0 && e[1] == 0 && e[2] == 0) e[0] = 1;
      const QVector x = lat.word_to_element(e);
      const auto pred = [&](const IVector& g) { return is_conjugate_in_G(*ex2.algebra, x, lat.word_to_element(g)).has_value(); };
      const auto en = enumerate_classes(lat, Window{{1, 1, 1, 4, 6}}, pred);
      EXPECT_EQ(static_cast<std::int64_t>(en.classes.size()), classes_in_G_class(ctx, x));
    }
  }
}

TEST(Spectra, ExampleIDiffersWithSameLengths) {
  const auto rep = compare_length_spectra(context("I", 1), context("I", 2), LengthWindow::parse("0..sqrt(13)"));
  EXPECT_TRUE(rep.complete);
  EXPECT_TRUE(rep.lengths_agree);
  ASSERT_TRUE(rep.differing.has_value());
  EXPECT_EQ(rep.same_length_spectrum(), "no");
  bool prime_differs = false;
  for (const auto& row : rep.rows) prime_differs = prime_differs || row.first.m_prime != row.second.m_prime;
  EXPECT_TRUE(prime_differs);
}

TEST(Spectra, ExampleIVReportFlagsHeadlineLength) {
  const auto rep = compare_length_spectra(context("IV", 1), context("IV", 2), std::vector<Length>{Length::parse("sqrt(4*pi*(7-pi))")});
  ASSERT_TRUE(rep.differing.has_value());
  EXPECT_EQ(rep.differing->expr, "sqrt(4*pi*(7-pi))");
  EXPECT_EQ(rep.same_length_spectrum(), "no");
  const auto csv = comparison_csv(rep);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "lambda_expression,lambda_float,m_prime_1,m_dprime_1,m_prime_2,m_dprime_2,differs,completeness");
}

TEST(Spectra, SweepIsWindowStableAndOrdered) {
  const auto s = sweep(context("III", 1), LengthWindow::parse("0..2"));
  EXPECT_TRUE(s.certified);
  EXPECT_TRUE(s.unknown_ranges.empty());
  for (std::size_t i = 1; i < s.entries.size(); ++i) EXPECT_TRUE(s.entries[i - 1].lambda < s.entries[i].lambda);
  const auto one = s.at(Length::parse("1"));
  EXPECT_EQ(one.m_prime, 20);
  EXPECT_EQ(one.m_dprime, 2);
  const auto none = s.at(Length::parse("sqrt(3)"));
  EXPECT_EQ(none.m_prime + none.m_dprime, 0);
  const auto csv = spectrum_csv(s.entries);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "lambda_expression,lambda_float,m_prime,m_dprime,completeness,witnesses");
}

TEST(Spectra, ProvisionalBeyondRotationBound) {
  // Example III quotient: lengths past 2 pi / sqrt(3) may hide intermediate periods.
  const auto s = sweep(context("III", 1), LengthWindow::parse("3.7..3.8"));
  EXPECT_FALSE(s.unknown_ranges.empty());
  EXPECT_EQ(s.at(Length::parse("3.75")).completeness, Completeness::provisional);
}
