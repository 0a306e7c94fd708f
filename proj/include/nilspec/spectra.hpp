#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nilspec/algebra.hpp"
#include "nilspec/geodesics.hpp"
#include "nilspec/group.hpp"

// Length spectra through the central submersion onto the two-step quotient.

namespace nilspec {

/// Polynomial in pi with rational coefficients; c[i] multiplies pi^i.
class PiPoly {
 public:
  PiPoly() = default;
  PiPoly(Rational constant) : c_{constant} { trim(); }  // NOLINT
  static PiPoly pi();
  const std::vector<Rational>& coefficients() const { return c_; }
  Rational coefficient(std::size_t i) const { return i < c_.size() ? c_[i] : Rational(); }
  bool is_zero() const { return c_.empty(); }
  bool is_rational() const { return c_.size() <= 1; }
  Rational rational() const;  // throws unless is_rational()
  long double value() const;
  /// Exact sign; pi is transcendental so a nonzero polynomial has a nonzero value.
  int sign() const;
  std::string str() const;

  PiPoly& operator+=(const PiPoly& o);
  PiPoly& operator-=(const PiPoly& o);
  friend PiPoly operator+(PiPoly a, const PiPoly& b) { return a += b; }
  friend PiPoly operator-(PiPoly a, const PiPoly& b) { return a -= b; }
  friend PiPoly operator*(const PiPoly& a, const PiPoly& b);
  PiPoly operator-() const;
  friend bool operator==(const PiPoly& a, const PiPoly& b) { return a.c_ == b.c_; }
  friend bool operator<(const PiPoly& a, const PiPoly& b) { return (a - b).sign() < 0; }
  friend bool operator<=(const PiPoly& a, const PiPoly& b) { return (a - b).sign() <= 0; }

  /// Arithmetic in pi: numbers (integer or decimal), pi, + - * / ^n and parentheses.
  static PiPoly parse(const std::string& text);

 private:
  void trim();
  std::vector<Rational> c_;
};

/// A length held through its exact square.
struct Length {
  PiPoly square;
  std::string expr;  // how it was written; canonical form when generated
  double value() const;
  /// "sqrt(E)" gives square E; any other expression E gives square E^2.
  static Length parse(const std::string& text);
  static Length from_square(const PiPoly& square);
  friend bool operator==(const Length& a, const Length& b) { return a.square == b.square; }
  friend bool operator<(const Length& a, const Length& b) { return a.square < b.square; }
};

struct LengthWindow {
  Length lo, hi;
  /// "a..b"
  static LengthWindow parse(const std::string& text);
};

/// Two-step nilpotent (or abelian) algebra with metric, and the data the
/// period formulas need.
struct TwoStepGeometry {
  LieAlgebra algebra;
  Metric metric;
  Subspace center, v;            // v = orthogonal complement of the center
  Subspace derived, derived_perp;
  /// Sum over an orthonormal basis of v of |[V_a, V_b]|^2 (both orders). A
  /// period strictly between the two extreme ones is at least sqrt(8 pi^2 / S).
  Rational bracket_norm2;
  // Heisenberg type: [n, n] spanned by z_hat and j(z_hat)^2 = -theta_bar^2 on v.
  std::optional<QVector> z_hat;
  Rational z_hat_norm2, theta2;  // theta2 for the unit vector along z_hat
  bool heisenberg_type() const { return z_hat.has_value(); }
  std::optional<PiPoly> gap2() const;  // nullopt: no intermediate periods at all

  static TwoStepGeometry build(const LieAlgebra& L, const Metric& m);
};

struct TwoStepPeriodData {
  QVector log;             // log of the element
  QVector V, Z, Zss;       // V*, Z*, Z**
  Rational v2, z2;         // |V*|^2, |Z**|^2
  bool min_is_period = false;   // |V*| is a period iff Z** = 0
  std::vector<Length> definite; // periods known to occur
  bool exhaustive = false;      // definite lists every period (closed-form cases)
};

TwoStepPeriodData two_step_periods(const TwoStepGeometry& g, const QVector& log_gamma);

/// {c} together with sqrt((4 pi k / theta)(c - pi k / theta)) for integers 1 <= k < c theta / (2 pi).
std::vector<Length> heisenberg_central_lengths(const Rational& c, const Rational& theta = 1);

enum class Verdict { yes, no, unknown };
std::string to_string(Verdict v);

struct PeriodDecision {
  Verdict verdict = Verdict::unknown;
  std::string reason;
};
/// Is sqrt(target) a period of the element? Exact for the structured cases.
PeriodDecision decide_period(const TwoStepGeometry& g, const TwoStepPeriodData& d, const PiPoly& target);

struct PeriodList {
  std::vector<Length> periods;  // sorted, within [lo, hi]
  bool complete = true;         // false when unknown intermediate periods may fall in the range
};
PeriodList periods_between(const TwoStepGeometry& g, const TwoStepPeriodData& d, const PiPoly& lo2, const PiPoly& hi2);

/// The lattice data used by all counts.
class SpectrumContext {
 public:
  SpectrumContext(const Lattice& lat, const Metric& m);
  const Lattice& lattice() const { return *lat_; }
  const Quotient& quotient() const { return quotient_; }
  const TwoStepGeometry& two_step() const { return two_step_; }
  const ClassInvariant& invariant() const { return invariant_; }
  const Metric& metric() const { return metric_; }
  /// Integer points t with |P(t)|^2 <= bound, P the projection to the abelianization.
  std::vector<IVector> tops_within(const PiPoly& bound) const;
  Rational top_norm2(const IVector& t) const;
  /// Canonical middle parts k for top t: pivot rows in [0, pivot), free rows in [-w, w].
  std::vector<IVector> middles(const IVector& t, std::int64_t w) const;
  IVector tuple(const IVector& t, const IVector& k) const;  // (t, k, 0)
  TwoStepPeriodData quotient_data(const IVector& t, const IVector& k) const;
  std::int64_t bottom_count(const IVector& t, const IVector& k) const;
  /// Central lattice elements with |log|^2 in [lo2, hi2], as (tuple, |log|^2).
  std::vector<std::pair<IVector, Rational>> central_within(const PiPoly& lo2, const PiPoly& hi2) const;

 private:
  const Lattice* lat_;
  Metric metric_;
  Quotient quotient_;
  TwoStepGeometry two_step_;
  ClassInvariant invariant_;
  QMatrix top_gram_;  // |P(sum t_i g_i)|^2 = t^T top_gram t
};

/// Period verdict for a noncentral gamma, read off the quotient.
PeriodDecision transfer_period(const SpectrumContext& ctx, const IVector& gamma, const Length& lambda);

struct CentralWitness {
  Length lambda;
  TranslationCertificate certificate;
};
/// Fiber geodesic through e in the direction of log gamma, gamma central.
CentralWitness central_period_witness(const Geometry& g, const LieAlgebra& L, const Metric& m, const QVector& gamma);

enum class Completeness { complete_for_structured_cases, provisional };
std::string to_string(Completeness c);

struct SpectrumEntry {
  Length lambda;
  std::int64_t m_prime = 0;   // noncentral classes
  std::int64_t m_dprime = 0;  // central classes (witness-based)
  Completeness completeness = Completeness::complete_for_structured_cases;
  std::vector<IVector> witnesses;  // (t, k, 0) tops of noncentral classes, then central tuples
  std::int64_t free_window = 0;    // final window on free middle coordinates
  bool window_certified = true;    // counts unchanged when that window was doubled
};

SpectrumEntry multiplicity_at(const SpectrumContext& ctx, const Length& lambda);

struct SweepResult {
  std::vector<SpectrumEntry> entries;  // lengths with m > 0, ascending
  // Squared-length ranges where a noncentral class may have periods the
  // structured cases do not decide.
  std::vector<std::pair<PiPoly, PiPoly>> unknown_ranges;
  std::int64_t free_window = 0;
  bool certified = true;
  /// Entry for lambda, or a zero entry carrying the right completeness flag.
  SpectrumEntry at(const Length& lambda) const;
};
SweepResult sweep(const SpectrumContext& ctx, const LengthWindow& window);

std::string spectrum_csv(const std::vector<SpectrumEntry>& entries);

struct ComparisonRow {
  Length lambda;
  SpectrumEntry first, second;
  bool differs() const { return first.m_prime + first.m_dprime != second.m_prime + second.m_dprime; }
  bool complete() const {
    return first.completeness == Completeness::complete_for_structured_cases &&
           second.completeness == Completeness::complete_for_structured_cases && first.window_certified &&
           second.window_certified;
  }
};

struct ClassCountSample {
  QVector x;
  std::int64_t first = 0, second = 0;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
  bool lengths_agree = true;       // same set of occurring lengths
  bool central_columns_equal = true;
  std::vector<ClassCountSample> class_counts;  // #{[gamma] in [x]_G} per lattice
  std::optional<Length> differing;             // first complete differing length
  bool complete = true;
  /// "yes", "no" or "undetermined" for the window.
  std::string same_length_spectrum() const;
};

/// Number of conjugacy classes of the lattice contained in the G-class of x. Exact.
std::int64_t classes_in_G_class(const SpectrumContext& ctx, const QVector& x);

ComparisonReport compare_length_spectra(const SpectrumContext& a, const SpectrumContext& b,
                                        const std::vector<Length>& lambdas);
ComparisonReport compare_length_spectra(const SpectrumContext& a, const SpectrumContext& b, const LengthWindow& window);
/// Samples lattice elements of both lattices (and G-conjugates of them) and compares class counts.
std::vector<ClassCountSample> sample_class_counts(const SpectrumContext& a, const SpectrumContext& b, int samples,
                                                  std::uint64_t seed, std::int64_t exponent_bound = 3);

std::string comparison_csv(const ComparisonReport& r);

}  // namespace nilspec
