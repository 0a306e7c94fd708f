#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nilspec/algebra.hpp"
#include "nilspec/group.hpp"

// Built-in example pairs I-V.

namespace nilspec {

/// Basis X1 X2 Y1 Y2 Z1 Z2 W with [X1,Y1] = [X2,Y2] = Z1, [X1,Y2] = Z2,
/// [X1,Z1] = [X2,Z2] = [Y1,Y2] = W. Shared by examples I, III and V.
LieAlgebra example_algebra_I();
/// Basis X1 Y1 Y2 Z W with [X1,Y1] = Z, [X1,Z] = [Y1,Y2] = W. Shared by II and IV.
LieAlgebra example_algebra_II();
/// Example V uses the same table as example I.
LieAlgebra example_algebra_V();
/// The other bracket block listed for example V; it fails the Jacobi identity.
LieAlgebra example_algebra_V_alternative_table();
/// Frame E1..E7 declared orthonormal for example V.
Metric example_metric_V();

struct ExpectedClaims {
  bool same_length_spectrum = true;
  std::optional<bool> same_marked_length_spectrum;
  std::string lambda;                 // headline length expression, empty when none
  std::optional<std::int64_t> m1, m2; // noncentral multiplicities at `lambda`
  std::string lambda_window;          // default sweep window "a..b"
};

struct ExampleRecord {
  std::string name;
  std::shared_ptr<const LieAlgebra> algebra;
  Metric metric;
  Lattice lattice1, lattice2;
  std::vector<ClosedForm> closed_forms1, closed_forms2;
  // Morphism bundle. Matrices act on columns: column j is the image of basis vector j.
  std::optional<QMatrix> phi;       // automorphism of g carrying lattice1 onto lattice2
  std::optional<QMatrix> psi1;      // isometric factor on the quotient
  std::optional<QMatrix> psi2;      // almost-inner factor on the quotient
  bool word_correspondence = false; // F sends the word with exponents e in lattice1 to the same word in lattice2
  ExpectedClaims expected;
  std::int64_t class_window = 2;    // default exponent window for class searches
};

std::vector<std::string> example_names();
/// Looks up "I".."V"; validated on first use. Throws std::invalid_argument for unknown names.
const ExampleRecord& example(const std::string& name);

struct ExampleValidation {
  bool ok = true;
  std::vector<std::string> messages;
};
ExampleValidation validate_example(const ExampleRecord& rec);

}  // namespace nilspec
