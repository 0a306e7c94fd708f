#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nilspec/algebra.hpp"
#include "nilspec/integer.hpp"

// Group points are carried by their log coordinates in the structural basis.
// Multiplication is the BCH series truncated after the cubic terms, which is
// exact for step <= 3.

namespace nilspec {

using DVector = std::vector<double>;

QVector bch_product(const LieAlgebra& L, const QVector& x, const QVector& y);
DVector bch_product(const LieAlgebra& L, const DVector& x, const DVector& y);
QVector group_inverse(const QVector& x);
DVector group_inverse(const DVector& x);
/// log(a x a^-1)
QVector conjugate(const LieAlgebra& L, const QVector& a, const QVector& x);
DVector conjugate(const LieAlgebra& L, const DVector& a, const DVector& x);
/// log(a x a^-1 x^-1)
QVector group_commutator(const LieAlgebra& L, const QVector& a, const QVector& x);

/// Some A with exp(A) exp(X) exp(-A) = exp(Y), or nullopt when x and y are not
/// conjugate in G. Complete for step <= 3: the solution set is an affine
/// family and each layer is an exact linear solve.
std::optional<QVector> is_conjugate_in_G(const LieAlgebra& L, const QVector& x, const QVector& y);
/// Least-squares version for float data; nullopt when the residual exceeds tol.
std::optional<DVector> is_conjugate_in_G(const LieAlgebra& L, const DVector& x, const DVector& y, double tol = 1e-9);

struct LatticeReport {
  bool ok = true;
  std::vector<std::string> problems;
  void fail(std::string msg) {
    ok = false;
    problems.push_back(std::move(msg));
  }
};

/// Lattice given by an ordered generator list, sorted by filtration depth. Every
/// element is g_1^e_1 ... g_n^e_n for a unique integer tuple e (canonical coordinates).
class Lattice {
 public:
  Lattice() = default;
  Lattice(std::shared_ptr<const LieAlgebra> algebra, std::vector<QVector> generators,
          std::vector<std::string> names = {});

  const LieAlgebra& algebra() const { return *algebra_; }
  std::shared_ptr<const LieAlgebra> algebra_ptr() const { return algebra_; }
  std::size_t rank() const { return generators_.size(); }
  const std::vector<QVector>& generators() const { return generators_; }
  const std::vector<std::string>& names() const { return names_; }
  /// Generator index range [begin, end) of depth d.
  std::pair<std::size_t, std::size_t> layer(std::size_t d) const { return {layer_start_[d], layer_start_[d + 1]}; }
  std::size_t layers() const { return layer_start_.size() - 1; }
  std::size_t layer_size(std::size_t d) const { return layer_start_[d + 1] - layer_start_[d]; }

  QVector word_to_element(std::span<const std::int64_t> exponents) const;
  QVector word_to_element(const IVector& exponents) const {
    return word_to_element(std::span<const std::int64_t>(exponents));
  }
  /// Canonical coordinates, or nullopt when x is not in the lattice.
  std::optional<IVector> coordinates(const QVector& x) const;
  bool contains(const QVector& x) const { return coordinates(x).has_value(); }

  /// Structural checks plus a closure test on words with exponents in [-window, window].
  LatticeReport validate(int window = 2) const;
  /// Lattice elements in the center of G, as a basis of canonical tuples.
  std::vector<IVector> central_basis() const;

 private:
  std::shared_ptr<const LieAlgebra> algebra_;
  std::vector<QVector> generators_;
  std::vector<std::string> names_;
  std::vector<std::size_t> layer_start_;
  QMatrix ginv_;  // coefficients of a vector in the generator-log basis
  Filtration filtration_;
};

/// Exact conjugacy-class invariant for lattices in groups of step <= 3.
///
/// Conjugation fixes the top exponents t; the middle exponents k move by the
/// lattice tau_t(Z^r); with k reduced, the bottom exponents j move by a
/// homomorphic image phi of the stabilizer. The canonical representative is
/// (t, k reduced mod tau_t, j reduced mod phi).
struct ClassData {
  IVector representative;              // canonical exponent tuple
  IVector conjugator;                  // word exponents a with a * gamma * a^-1 = representative
  std::optional<std::int64_t> middle_index;  // |Z^m1 / tau_t| when finite
  std::optional<std::int64_t> bottom_index;  // |Z^m2 / phi| when finite
};

class ClassInvariant {
 public:
  explicit ClassInvariant(const Lattice& lat) : lat_(&lat) {}

  ClassData classify(const IVector& gamma) const;
  bool same_class(const IVector& a, const IVector& b) const {
    return classify(a).representative == classify(b).representative;
  }
  /// Lattice tau_t of middle shifts for the top exponents t, as a Hermite form.
  ColumnHermite middle_lattice(const IVector& gamma) const;
  /// Lattice phi of bottom shifts for gamma, assuming gamma's middle part is already reduced.
  ColumnHermite bottom_lattice(const IVector& gamma) const;

 private:
  IVector conjugate_coords(const IVector& a, const IVector& gamma) const;
  const Lattice* lat_;
};

/// Exponent box: coordinates with |e_i| <= bound[i].
struct Window {
  IVector bound;
  static Window uniform(std::size_t n, std::int64_t b) { return Window{IVector(n, b)}; }
  bool contains(const IVector& e) const;
  std::size_t size() const;
  Window doubled() const;
  void for_each(const std::function<void(const IVector&)>& f) const;
};

struct ConjugacyClass {
  IVector representative;  // lexicographically least tuple of the class inside the window
  std::size_t size_in_window = 0;
};

struct Enumeration {
  std::vector<ConjugacyClass> classes;
  Window window;
  bool certified = false;  // count unchanged when the window is doubled
};

using Predicate = std::function<bool(const IVector&)>;

/// Brute-force partition of the predicate elements of `candidates` into classes,
/// using conjugation by generators inside the candidate box widened by `margin`.
std::vector<ConjugacyClass> partition_classes(const Lattice& lat, const std::vector<IVector>& candidates,
                                              const Window& explore);
/// Partition of all window elements satisfying `pred`. Doubles once to certify.
Enumeration enumerate_classes(const Lattice& lat, const Window& window, const Predicate& pred,
                              std::int64_t margin = 2);
/// Same, over an explicit candidate list generator parametrized by window scale.
Enumeration enumerate_classes(const Lattice& lat, const std::function<std::vector<IVector>(int)>& candidates,
                              const std::function<Window(int)>& explore, int scale = 1);

std::string classes_csv(const std::vector<ConjugacyClass>& classes, const std::string& tag);

/// Closed-form conjugation rule: image exponents of gamma under conjugation by
/// the parameter tuple p (a family-specific conjugator parametrization).
struct ClosedForm {
  std::string name;
  std::size_t params = 0;
  std::function<std::optional<IVector>(const IVector& gamma, const IVector& p)> apply;
};

struct LatticeConjugacy {
  bool conjugate = false;
  std::optional<IVector> witness;            // conjugator word exponents in the lattice
  bool brute_force_found = false;
  std::optional<bool> closed_form_agrees;    // nullopt when no closed form applies or it is inconclusive
};

/// Exact class invariant as arbiter, brute-force search in the window for a
/// witness, and closed-form cross-check. Throws std::logic_error on disagreement.
LatticeConjugacy is_conjugate_in_lattice(const Lattice& lat, const IVector& a, const IVector& b, std::int64_t window,
                                         const std::vector<ClosedForm>& closed_forms = {});

}  // namespace nilspec
