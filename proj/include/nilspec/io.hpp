#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "nilspec/algebra.hpp"
#include "nilspec/group.hpp"

// JSON files for algebras, metrics, lattices and morphisms. Rationals are "p/q" strings.

namespace nilspec {

using json = nlohmann::ordered_json;

/// Parse or schema error; `where` names the field path or "line L, column C".
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(where) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

json rational_to_json(const Rational& r);
Rational rational_from_json(const json& j, const std::string& where);
json vector_to_json(const QVector& v);
QVector vector_from_json(const json& j, std::size_t n, const std::string& where);
json matrix_to_json(const QMatrix& m);  // rows
QMatrix matrix_from_json(const json& j, std::size_t rows, std::size_t cols, const std::string& where);

/// {dim, labels, brackets: [{i, j, coeffs: {k: "p/q"}}], step}; i, j, k are 0-based.
json algebra_to_json(const LieAlgebra& L);
/// Keeps the tensor verbatim so check_structure can report foreign inconsistencies.
LieAlgebra algebra_from_json(const json& j);

/// {frame: rows of "p/q"}; row i is the orthonormal vector E_i in the structural basis.
json metric_to_json(const Metric& m);
Metric metric_from_json(const json& j, std::size_t n);

/// {algebra_ref, generators: [["p/q", ...]], names: [...]}
json lattice_to_json(const Lattice& lat, const std::string& algebra_ref);
Lattice lattice_from_json(const json& j, std::shared_ptr<const LieAlgebra> algebra);

/// {source, target, matrix: rows of "p/q"}; column j of the matrix is the image of b_j.
json morphism_to_json(const QMatrix& m, const std::string& source, const std::string& target);
QMatrix morphism_from_json(const json& j, std::size_t n);

/// Reads and parses a JSON file, translating syntax errors to line/column form.
json read_json_file(const std::string& path);

}  // namespace nilspec
