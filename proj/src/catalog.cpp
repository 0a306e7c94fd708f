#include "nilspec/catalog.hpp"

#include <map>
#include <mutex>
#include <stdexcept>

namespace nilspec {

namespace {

using R = Rational;

enum I7 : std::size_t { X1, X2, Y1, Y2, Z1, Z2, W7 };
enum I5 : std::size_t { A_X1, A_Y1, A_Y2, A_Z, A_W };

QVector vec(std::size_t n, std::initializer_list<std::pair<std::size_t, R>> entries) {
  QVector v(n);
  for (const auto& [i, c] : entries) v[i] += c;
  return v;
}

std::vector<BracketTerm> table_I() {
  return {{X1, Y1, Z1, R(1)}, {X2, Y2, Z1, R(1)}, {X1, Y2, Z2, R(1)},
          {X1, Z1, W7, R(1)}, {X2, Z2, W7, R(1)}, {Y1, Y2, W7, R(1)}};
}

std::vector<std::string> labels7() { return {"X1", "X2", "Y1", "Y2", "Z1", "Z2", "W"}; }

ClosedForm form_II(bool second) {
  return {second ? "II-gamma2" : "II-gamma1", 5, [second](const IVector& g, const IVector& p) -> std::optional<IVector> {
            const auto n1 = g[0], m1 = g[1], m2 = g[2], k = g[3];
            const auto N1 = p[0], M1 = p[1], M2 = p[2], K = p[3];
            IVector out = g;
            out[3] = k + 2 * (N1 * m1 - M1 * n1);
            out[4] = g[4] - 2 * K * n1 - 4 * M1 * N1 * n1 + M1 * m2 + 2 * M1 * n1 * n1 - M2 * m1 + 2 * N1 * N1 * m1 +
                     2 * N1 * k;
            if (second) out[4] += N1 * m1 - M1 * n1;
            return out;
          }};
}

ClosedForm form_IV_second() {
  return {"IV-gamma2", 5, [](const IVector& g, const IVector& p) -> std::optional<IVector> {
            const auto n1 = g[0], m1 = g[1], m2 = g[2], k = g[3];
            const auto N1 = p[0], M1 = p[1], M2 = p[2], K = p[3];
            IVector out = g;
            out[3] = k + 2 * (N1 * m1 - M1 * n1);
            out[4] = g[4] - K * n1 - 2 * M1 * N1 * n1 + 4 * M1 * m2 + M1 * n1 * n1 - 4 * M2 * m1 + N1 * N1 * m1 + N1 * k;
            return out;
          }};
}

// Variant 0: lattice {2X1,2X2,Y1,Y2,...}; 1: {X1,X2,2Y1,2Y2,...}; 2: the Y2 + Z2/2 lattice.
ClosedForm form_III(int variant) {
  static const char* names[] = {"III-gamma1", "III-gamma2", "I-gamma2"};
  return {names[variant], 7, [variant](const IVector& g, const IVector& p) -> std::optional<IVector> {
            const auto a1 = g[0], a2 = g[1], b1 = g[2], b2 = g[3], k1 = g[4], k2 = g[5];
            const auto A1 = p[0], A2 = p[1], B1 = p[2], B2 = p[3], K1 = p[4], K2 = p[5];
            IVector out = g;
            out[4] = k1 + 2 * (A1 * b1 + A2 * b2 - B1 * a1 - B2 * a2);
            out[5] = k2 + 2 * (A1 * b2 - B2 * a1);
            std::int64_t dj;
            if (variant == 1) {
              dj = A1 * A1 * b1 + 2 * A1 * A2 * b2 - 2 * A1 * B1 * a1 - 2 * A1 * B2 * a2 + A1 * k1 - 2 * A2 * B2 * a1 +
                   A2 * k2 + B1 * a1 * a1 + 4 * B1 * b2 + 2 * B2 * a1 * a2 - 4 * B2 * b1 - K1 * a1 - K2 * a2;
            } else {
              dj = 2 * A1 * A1 * b1 + 4 * A1 * A2 * b2 - 4 * A1 * B1 * a1 - 4 * A1 * B2 * a2 + 2 * A1 * k1 -
                   4 * A2 * B2 * a1 + 2 * A2 * k2 + 2 * B1 * a1 * a1 + B1 * b2 + 4 * B2 * a1 * a2 - B2 * b1 - 2 * K1 * a1 -
                   2 * K2 * a2;
              if (variant == 2) dj += A2 * b2 - B2 * a2;
            }
            out[6] = g[6] + dj;
            return out;
          }};
}

std::vector<QVector> scaled_basis(std::size_t n, const std::vector<R>& scale) {
  std::vector<QVector> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(unit_vector(n, i, scale[i]));
  return out;
}

std::vector<std::string> gen_names(const std::vector<std::string>& labels, const std::vector<R>& scale) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < labels.size(); ++i)
    out.push_back(scale[i] == R(1) ? labels[i] : scale[i].str().substr(0, scale[i].str().find('/')) + labels[i]);
  return out;
}

QMatrix phi_V() {
  const std::size_t n = 7;
  return QMatrix::from_columns({
      vec(n, {{X1, R(-1)}, {X2, R(1)}, {Y1, R(1, 4)}, {Y2, R(1, 2)}}),
      vec(n, {{X2, R(1)}, {Y1, R(-1, 2)}, {Z1, R(1, 4)}}),
      vec(n, {{Y1, R(-1)}}),
      vec(n, {{Y1, R(2)}, {Y2, R(1)}, {Z2, R(1)}}),
      vec(n, {{Z1, R(1)}, {W7, R(1, 2)}}),
      vec(n, {{Z1, R(-1)}, {Z2, R(-1)}, {W7, R(1, 4)}}),
      vec(n, {{W7, R(-1)}}),
  });
}

QMatrix psi1_V() {
  const std::size_t n = 6;
  return QMatrix::from_columns({
      vec(n, {{X1, R(-1)}, {X2, R(1)}, {Y1, R(1, 4)}, {Y2, R(1, 2)}}),
      vec(n, {{X2, R(1)}, {Y1, R(-1, 2)}}),
      vec(n, {{Y1, R(-1)}}),
      vec(n, {{Y1, R(2)}, {Y2, R(1)}}),
      vec(n, {{Z1, R(1)}}),
      vec(n, {{Z1, R(-1)}, {Z2, R(-1)}}),
  });
}

QMatrix psi2_V() {
  const std::size_t n = 6;
  return QMatrix::from_columns({
      vec(n, {{X1, R(1)}}),
      vec(n, {{X2, R(1)}, {Z1, R(1, 4)}}),
      vec(n, {{Y1, R(1)}}),
      vec(n, {{Y2, R(1)}, {Z1, R(-1)}, {Z2, R(-1)}}),
      vec(n, {{Z1, R(1)}}),
      vec(n, {{Z2, R(1)}}),
  });
}

ExampleRecord build(const std::string& name) {
  ExampleRecord rec;
  rec.name = name;
  if (name == "I" || name == "III" || name == "V") {
    auto L = std::make_shared<const LieAlgebra>(example_algebra_I());
    rec.algebra = L;
    rec.metric = Metric::identity(7);
    const std::vector<R> s1 = {2, 2, 1, 1, 1, 1, 1};
    rec.lattice1 = Lattice(L, scaled_basis(7, s1), gen_names(labels7(), s1));
    rec.closed_forms1 = {form_III(0)};
    if (name == "III") {
      const std::vector<R> s2 = {1, 1, 2, 2, 1, 1, 1};
      rec.lattice2 = Lattice(L, scaled_basis(7, s2), gen_names(labels7(), s2));
      rec.closed_forms2 = {form_III(1)};
      rec.expected = {false, std::nullopt, "1", 20, 16, "0..2"};
    } else if (name == "I") {
      auto g = scaled_basis(7, s1);
      g[Y2] = vec(7, {{Y2, R(1)}, {Z2, R(1, 2)}});
      auto names = gen_names(labels7(), s1);
      names[Y2] = "Y2+Z2/2";
      rec.lattice2 = Lattice(L, g, names);
      rec.closed_forms2 = {form_III(2)};
      rec.word_correspondence = true;
      rec.expected = {false, false, "", std::nullopt, std::nullopt, "0..sqrt(13)"};
    } else {
      rec.metric = example_metric_V();
      rec.phi = phi_V();
      std::vector<QVector> g;
      for (const auto& v : scaled_basis(7, s1)) g.push_back(*rec.phi * v);
      std::vector<std::string> names;
      for (const auto& nm : gen_names(labels7(), s1)) names.push_back("Phi(" + nm + ")");
      rec.lattice2 = Lattice(L, g, names);
      rec.psi1 = psi1_V();
      rec.psi2 = psi2_V();
      rec.expected = {true, true, "", std::nullopt, std::nullopt, "0..2"};
    }
  } else if (name == "II" || name == "IV") {
    auto L = std::make_shared<const LieAlgebra>(example_algebra_II());
    rec.algebra = L;
    rec.metric = Metric::identity(5);
    const std::vector<std::string> labels = {"X1", "Y1", "Y2", "Z", "W"};
    const std::vector<R> s1 = {2, 1, 1, 1, 1};
    rec.lattice1 = Lattice(L, scaled_basis(5, s1), gen_names(labels, s1));
    rec.closed_forms1 = {form_II(false)};
    if (name == "II") {
      auto g = scaled_basis(5, s1);
      g[A_Y1] = vec(5, {{A_Y1, R(1)}, {A_Z, R(1, 2)}});
      auto names = gen_names(labels, s1);
      names[A_Y1] = "Y1+Z/2";
      rec.lattice2 = Lattice(L, g, names);
      rec.closed_forms2 = {form_II(true)};
      rec.word_correspondence = true;
      rec.expected = {true, false, "", std::nullopt, std::nullopt, "0..3"};
    } else {
      const std::vector<R> s2 = {1, 2, 2, 1, 1};
      rec.lattice2 = Lattice(L, scaled_basis(5, s2), gen_names(labels, s2));
      rec.closed_forms2 = {form_IV_second()};
      rec.expected = {false, std::nullopt, "sqrt(4*pi*(7-pi))", 28, 14, "0..7"};
      rec.class_window = 8;
    }
  } else {
    throw std::invalid_argument("unknown example '" + name + "' (expected I, II, III, IV or V)");
  }
  const auto v = validate_example(rec);
  if (!v.ok) {
    std::string msg = "example " + name + " failed validation:";
    for (const auto& m : v.messages) msg += " " + m + ";";
    throw std::logic_error(msg);
  }
  return rec;
}

}  // namespace

LieAlgebra example_algebra_I() { return LieAlgebra::from_brackets(labels7(), table_I(), 3); }

LieAlgebra example_algebra_II() {
  return LieAlgebra::from_brackets({"X1", "Y1", "Y2", "Z", "W"},
                                   {{A_X1, A_Y1, A_Z, R(1)}, {A_X1, A_Z, A_W, R(1)}, {A_Y1, A_Y2, A_W, R(1)}}, 3);
}

LieAlgebra example_algebra_V() { return example_algebra_I(); }

LieAlgebra example_algebra_V_alternative_table() {
  return LieAlgebra::from_brackets(
      labels7(),
      {{X1, X2, Y1, R(1)},  {Y1, Y2, Z1, R(1)},  {X1, Y2, Z2, R(1)},  {X2, Y1, Z2, R(-1)}, {X1, Z1, Z2, R(-1)},
       {X2, Z1, Z2, R(1)},  {X1, Z2, Z1, R(1)},  {X2, Z2, Z1, R(-1)}, {Y1, Z1, Z2, R(-1)}, {Y2, Z1, Z2, R(1)},
       {Y1, Z2, Z1, R(1)},  {Y2, Z2, Z1, R(-1)}, {Z1, Z2, W7, R(1)}},
      3);
}

Metric example_metric_V() {
  const std::size_t n = 7;
  return Metric(QMatrix::from_rows({
      vec(n, {{X1, R(1)}, {X2, R(-1, 2)}, {Y2, R(-1, 4)}}),
      vec(n, {{X2, R(1)}, {Y1, R(-1, 4)}}),
      vec(n, {{Y1, R(1)}}),
      vec(n, {{Y1, R(1)}, {Y2, R(1)}}),
      vec(n, {{Z1, R(1)}}),
      vec(n, {{Z1, R(1, 2)}, {Z2, R(1)}}),
      vec(n, {{W7, R(1)}}),
  }));
}

std::vector<std::string> example_names() { return {"I", "II", "III", "IV", "V"}; }

const ExampleRecord& example(const std::string& name) {
  static std::mutex mu;
  static std::map<std::string, std::unique_ptr<ExampleRecord>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, std::make_unique<ExampleRecord>(build(name))).first;
  return *it->second;
}

ExampleValidation validate_example(const ExampleRecord& rec) {
  ExampleValidation out;
  const auto fail = [&](std::string m) {
    out.ok = false;
    out.messages.push_back(std::move(m));
  };
  const auto rep = check_structure(*rec.algebra);
  if (!rep.antisymmetry.empty()) fail("antisymmetry violated");
  if (!rep.jacobi.empty()) fail(std::to_string(rep.jacobi.size()) + " Jacobi violations");
  if (rep.step_mismatch) fail("declared step differs from computed step");
  if (is_strictly_nonsingular(*rec.algebra).verdict != NonsingularVerdict::passed_randomized)
    fail("algebra is not strictly nonsingular");
  for (const auto* lat : {&rec.lattice1, &rec.lattice2}) {
    const auto lr = lat->validate();
    for (const auto& p : lr.problems) fail(p);
  }
  return out;
}

}  // namespace nilspec
