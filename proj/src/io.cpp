#include "nilspec/io.hpp"

#include <fstream>
#include <sstream>

namespace nilspec {

namespace {

std::string at(const std::string& where, std::size_t i) { return where + "[" + std::to_string(i) + "]"; }
std::string at(const std::string& where, const std::string& key) { return where.empty() ? key : where + "." + key; }

const json& field(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) throw FormatError(where.empty() ? "<root>" : where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw FormatError(at(where, key), "missing field");
  return *it;
}

std::size_t index_from_json(const json& j, std::size_t n, const std::string& where) {
  if (!j.is_number_integer()) throw FormatError(where, "expected an integer index");
  const auto v = j.get<std::int64_t>();
  if (v < 0 || static_cast<std::size_t>(v) >= n) throw FormatError(where, "index out of range");
  return static_cast<std::size_t>(v);
}

std::size_t index_from_key(const std::string& key, std::size_t n, const std::string& where) {
  std::size_t pos = 0;
  long long v = -1;
  try {
    v = std::stoll(key, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != key.size() || v < 0 || static_cast<std::size_t>(v) >= n) throw FormatError(where, "bad basis index '" + key + "'");
  return static_cast<std::size_t>(v);
}

}  // namespace

json rational_to_json(const Rational& r) { return r.str(); }

Rational rational_from_json(const json& j, const std::string& where) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (!j.is_string()) throw FormatError(where, "expected a \"p/q\" string");
  try {
    return Rational::parse(j.get<std::string>());
  } catch (const std::exception& e) {
    throw FormatError(where, e.what());
  }
}

json vector_to_json(const QVector& v) {
  json out = json::array();
  for (const auto& x : v) out.push_back(rational_to_json(x));
  return out;
}

QVector vector_from_json(const json& j, std::size_t n, const std::string& where) {
  if (!j.is_array()) throw FormatError(where, "expected an array");
  if (j.size() != n) throw FormatError(where, "expected " + std::to_string(n) + " entries, got " + std::to_string(j.size()));
  QVector v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = rational_from_json(j[i], at(where, i));
  return v;
}

json matrix_to_json(const QMatrix& m) {
  json out = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) out.push_back(vector_to_json(m.row(r)));
  return out;
}

QMatrix matrix_from_json(const json& j, std::size_t rows, std::size_t cols, const std::string& where) {
  if (!j.is_array()) throw FormatError(where, "expected an array of rows");
  if (j.size() != rows) throw FormatError(where, "expected " + std::to_string(rows) + " rows");
  std::vector<QVector> r;
  for (std::size_t i = 0; i < rows; ++i) r.push_back(vector_from_json(j[i], cols, at(where, i)));
  return QMatrix::from_rows(r);
}

json algebra_to_json(const LieAlgebra& L) {
  json br = json::array();
  for (std::size_t i = 0; i < L.dim(); ++i)
    for (std::size_t j = i + 1; j < L.dim(); ++j) {
      json coeffs = json::object();
      for (std::size_t k = 0; k < L.dim(); ++k)
        if (!L.constant(i, j, k).is_zero()) coeffs[std::to_string(k)] = rational_to_json(L.constant(i, j, k));
      if (!coeffs.empty()) br.push_back(json{{"i", i}, {"j", j}, {"coeffs", coeffs}});
    }
  return json{{"dim", L.dim()}, {"labels", L.labels()}, {"brackets", br}, {"step", L.declared_step()}};
}

LieAlgebra algebra_from_json(const json& j) {
  const auto& d = field(j, "dim", "");
  if (!d.is_number_integer() || d.get<std::int64_t>() <= 0) throw FormatError("dim", "expected a positive integer");
  const auto n = d.get<std::size_t>();
  std::vector<std::string> labels;
  if (j.contains("labels")) {
    const auto& lj = j["labels"];
    if (!lj.is_array() || lj.size() != n) throw FormatError("labels", "expected " + std::to_string(n) + " names");
    for (std::size_t i = 0; i < n; ++i) {
      if (!lj[i].is_string()) throw FormatError(at("labels", i), "expected a string");
      labels.push_back(lj[i].get<std::string>());
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) labels.push_back("b" + std::to_string(i));
  }
  int step = 0;
  if (j.contains("step")) {
    if (!j["step"].is_number_integer()) throw FormatError("step", "expected an integer");
    step = j["step"].get<int>();
  }
  std::vector<std::vector<std::vector<Rational>>> c(n, std::vector<std::vector<Rational>>(n, std::vector<Rational>(n)));
  const auto& br = field(j, "brackets", "");
  if (!br.is_array()) throw FormatError("brackets", "expected an array");
  for (std::size_t e = 0; e < br.size(); ++e) {
    const std::string w = at("brackets", e);
    const auto i = index_from_json(field(br[e], "i", w), n, at(w, "i"));
    const auto jj = index_from_json(field(br[e], "j", w), n, at(w, "j"));
    const auto& coeffs = field(br[e], "coeffs", w);
    if (!coeffs.is_object()) throw FormatError(at(w, "coeffs"), "expected an object");
    // Entries give [b_i, b_j]; the reverse order is filled by antisymmetry unless listed separately.
    for (const auto& [key, val] : coeffs.items()) {
      const auto k = index_from_key(key, n, at(at(w, "coeffs"), key));
      const auto v = rational_from_json(val, at(at(w, "coeffs"), key));
      c[i][jj][k] += v;
    }
  }
  // Fill each unordered pair that was given in one order only.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t jj = i + 1; jj < n; ++jj) {
      bool upper = false, lower = false;
      for (std::size_t k = 0; k < n; ++k) {
        upper = upper || !c[i][jj][k].is_zero();
        lower = lower || !c[jj][i][k].is_zero();
      }
      if (upper && !lower)
        for (std::size_t k = 0; k < n; ++k) c[jj][i][k] = -c[i][jj][k];
      else if (lower && !upper)
        for (std::size_t k = 0; k < n; ++k) c[i][jj][k] = -c[jj][i][k];
    }
  return LieAlgebra::from_tensor(std::move(labels), std::move(c), step);
}

json metric_to_json(const Metric& m) { return json{{"frame", matrix_to_json(m.frame())}}; }

Metric metric_from_json(const json& j, std::size_t n) {
  auto F = matrix_from_json(field(j, "frame", ""), n, n, "frame");
  if (!inverse(F)) throw FormatError("frame", "frame is singular");
  return Metric(std::move(F));
}

json lattice_to_json(const Lattice& lat, const std::string& algebra_ref) {
  json gens = json::array();
  for (const auto& g : lat.generators()) gens.push_back(vector_to_json(g));
  json out{{"algebra_ref", algebra_ref}, {"generators", gens}};
  if (!lat.names().empty()) out["names"] = lat.names();
  return out;
}

Lattice lattice_from_json(const json& j, std::shared_ptr<const LieAlgebra> algebra) {
  const auto n = algebra->dim();
  const auto& gj = field(j, "generators", "");
  if (!gj.is_array()) throw FormatError("generators", "expected an array");
  std::vector<QVector> gens;
  for (std::size_t i = 0; i < gj.size(); ++i) gens.push_back(vector_from_json(gj[i], n, at("generators", i)));
  std::vector<std::string> names;
  if (j.contains("names")) {
    if (!j["names"].is_array() || j["names"].size() != gens.size())
      throw FormatError("names", "expected one name per generator");
    for (const auto& s : j["names"]) names.push_back(s.get<std::string>());
  }
  try {
    return Lattice(std::move(algebra), std::move(gens), std::move(names));
  } catch (const std::exception& e) {
    throw FormatError("generators", e.what());
  }
}

json morphism_to_json(const QMatrix& m, const std::string& source, const std::string& target) {
  return json{{"source", source}, {"target", target}, {"matrix", matrix_to_json(m)}};
}

QMatrix morphism_from_json(const json& j, std::size_t n) { return matrix_from_json(field(j, "matrix", ""), n, n, "matrix"); }

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path, "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw FormatError(path + ": line " + std::to_string(line) + ", column " + std::to_string(col), "syntax error");
  }
}

}  // namespace nilspec
