#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nilspec/algebra.hpp"
#include "nilspec/group.hpp"
#include "nilspec/io.hpp"

// Automorphisms, isometries, almost-inner maps and marking certificates.

namespace nilspec {

/// Linear map of an algebra to itself; column j is the image of basis vector j.
struct Morphism {
  std::shared_ptr<const LieAlgebra> algebra;
  QMatrix matrix;
  Morphism() = default;
  Morphism(std::shared_ptr<const LieAlgebra> L, QMatrix m);  // throws on a size mismatch
  std::size_t dim() const { return matrix.rows(); }
  QVector operator()(const QVector& x) const { return matrix * x; }
  static Morphism identity(std::shared_ptr<const LieAlgebra> L);
};

Morphism compose(const Morphism& a, const Morphism& b);  // a after b
/// exp(ad a), the inner automorphism x -> a x a^-1 at the algebra level.
Morphism inner_automorphism(std::shared_ptr<const LieAlgebra> L, const QVector& a);
/// Some a with M = exp(ad a), when M is inner.
std::optional<QVector> inner_witness(const Morphism& M);

struct AutomorphismCheck {
  bool invertible = false;
  std::optional<std::pair<std::size_t, std::size_t>> violating_pair;  // basis indices i < j
  bool ok() const { return invertible && !violating_pair; }
};
AutomorphismCheck is_lie_algebra_automorphism(const Morphism& M);

/// log(Phi(exp x)). Throws std::invalid_argument unless M is an automorphism.
QVector apply_to_group(const Morphism& M, const QVector& x);

struct LatticeMapCheck {
  bool ok = true;
  std::vector<std::string> failures;  // generators without canonical coordinates in the target
};
/// Phi(lat1) = lat2: images of the generators lie in lat2 and preimages of lat2's generators in lat1.
LatticeMapCheck maps_lattice(const Morphism& M, const Lattice& lat1, const Lattice& lat2);

struct IsometryCheck {
  bool ok = true;
  std::optional<std::pair<std::size_t, std::size_t>> violating_pair;
  Rational expected, actual;  // <u, v> and <Mu, Mv> at that pair
};
IsometryCheck is_isometry(const Morphism& M, const Metric& m);
IsometryCheck matrix_isometry(const QMatrix& M, const Metric& m);

enum class AlmostInnerVerdict { proven_false, passed_randomized };
std::string to_string(AlmostInnerVerdict v);

struct ConjugacyWitness {
  QVector x;   // sample, or lattice element log
  QVector a;   // exp(a) exp(x) exp(-a) = Phi(exp x)
  IVector word;  // lattice exponents, empty for free samples
};

struct AlmostInnerResult {
  AlmostInnerVerdict verdict = AlmostInnerVerdict::passed_randomized;
  std::vector<ConjugacyWitness> witnesses;
  std::optional<QVector> constant_witness;  // one a working for every sample
  // Exact disproof: Phi(exp x) is not conjugate to exp x. is_conjugate_in_G is
  // complete for step <= 3, so no a exists.
  std::optional<QVector> counterexample, counterexample_image;
  std::optional<IVector> counterexample_word;
  int checked = 0;
};

/// Basis vectors, pairwise sums, then seeded random samples with entries p/q,
/// |p| <= 3, q in {1, 2}.
std::vector<QVector> almost_inner_samples(std::size_t n, int samples, std::uint64_t seed);
AlmostInnerResult is_almost_inner(const Morphism& M, int samples = 200, std::uint64_t seed = 1);

/// Every lattice element in the window checked against its image.
AlmostInnerResult is_gamma_almost_inner(const Morphism& M, const Lattice& lat, const Window& window);
/// Same for a correspondence on words that need not be a homomorphism.
AlmostInnerResult is_gamma_almost_inner(const Lattice& lat, const std::function<QVector(const IVector&)>& image,
                                        const Window& window);

/// Induced map on the quotient by the last derived term. Throws std::invalid_argument
/// when M does not preserve that term.
Morphism project_morphism(const Morphism& M, const Quotient& q, std::shared_ptr<const LieAlgebra> quotient_algebra);

/// Image of a lattice in the quotient: projected generators with the zero ones dropped.
Lattice project_lattice(const Lattice& lat, const Quotient& q, std::shared_ptr<const LieAlgebra> quotient_algebra);

struct Factorization {
  QMatrix psi1, psi2;  // on the quotient, isometric then almost-inner factor
};

struct MarkingCheck {
  bool ok = false;
  bool ran = true;
  std::string detail;
  json witness;
};

struct MarkingReport {
  MarkingCheck generator_image;       // (a)
  MarkingCheck central_intersection;  // (b)
  MarkingCheck central_case;          // (c)
  MarkingCheck projection_factorization;  // (d)
  MarkingCheck quotient_marking;      // (e) numeric spot-checks
  bool certifying = false;            // a factorization was supplied
  bool passed() const {
    return certifying && generator_image.ok && central_intersection.ok && central_case.ok &&
           projection_factorization.ok && quotient_marking.ok;
  }
};

struct MarkingOptions {
  std::int64_t window = 1;       // exponent window for the spot-checks
  int almost_inner_samples = 100;
  std::uint64_t seed = 1;
  double tolerance = 1e-4;
};

MarkingReport verify_marking(const Morphism& phi, const Lattice& lat1, const Lattice& lat2, const Metric& metric,
                             const std::optional<Factorization>& factors, const MarkingOptions& opts = {});

json to_json(const MarkingReport& r);

/// Candidate isometric factor whose columns are known up to free multiples of
/// the basis vector e_z: column i is base[i] + t_i e_z for i in `free`, and
/// column z is fixed. The pairs (e_z, e_i) force each t_i; the remaining pairs
/// are then checked exactly.
struct IsometricFactorRefutation {
  bool refuted = false;
  std::optional<std::pair<std::size_t, std::size_t>> violating_pair;
  Rational expected, actual;
  std::vector<Rational> forced;  // t_i
  std::string detail;
};
IsometricFactorRefutation refute_isometric_factor(const QMatrix& base, std::size_t z,
                                                  const std::vector<std::size_t>& free, const Metric& m);

/// Quotient factor forced by an isomorphism of the example II lattices with
/// parameters h1, h3, h4 and signs (for X1, Y1, Y2, Z): columns on X1 Y1 Y2 Z.
QMatrix example_II_forced_factor(std::int64_t h1, std::int64_t h3, std::int64_t h4, const std::array<int, 4>& signs);

}  // namespace nilspec
