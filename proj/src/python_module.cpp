#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "nilspec/catalog.hpp"
#include "nilspec/cli.hpp"
#include "nilspec/geodesics.hpp"
#include "nilspec/group.hpp"
#include "nilspec/morphisms.hpp"
#include "nilspec/spectra.hpp"

namespace py = pybind11;
using namespace nilspec;

namespace {

// Rationals cross the boundary as fractions.Fraction.
py::object to_fraction(const Rational& r) {
  return py::module_::import("fractions").attr("Fraction")(py::str(r.str()));
}

Rational from_python(const py::handle& h) { return Rational::parse(py::str(h).cast<std::string>()); }

QVector vector_from(const py::sequence& s, std::size_t n) {
  if (s.size() != n) throw std::invalid_argument("expected " + std::to_string(n) + " coordinates");
  QVector v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = from_python(s[i]);
  return v;
}

py::list vector_to(const QVector& v) {
  py::list out;
  for (const auto& c : v) out.append(to_fraction(c));
  return out;
}

const SpectrumContext& context(const std::string& name, int which) {
  static std::map<std::pair<std::string, int>, std::unique_ptr<SpectrumContext>> cache;
  if (which != 1 && which != 2) throw std::invalid_argument("lattice must be 1 or 2");
  auto& slot = cache[{name, which}];
  if (!slot) {
    const auto& ex = example(name);
    slot = std::make_unique<SpectrumContext>(which == 1 ? ex.lattice1 : ex.lattice2, ex.metric);
  }
  return *slot;
}

py::dict entry_dict(const SpectrumEntry& e) {
  py::dict d;
  d["lambda"] = e.lambda.expr;
  d["lambda_float"] = e.lambda.value();
  d["m_prime"] = e.m_prime;
  d["m_dprime"] = e.m_dprime;
  d["completeness"] = to_string(e.completeness);
  d["window_certified"] = e.window_certified;
  d["witnesses"] = e.witnesses;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Length spectra of nilmanifolds: exact algebra, geodesic certificates, marking checks";

  m.def("examples", &example_names, "Names of the built-in example pairs.");

  m.def(
      "labels", [](const std::string& name) { return example(name).algebra->labels(); }, py::arg("example"));

  m.def(
      "step", [](const std::string& name) { return example(name).algebra->step(); }, py::arg("example"));

  m.def(
      "bch_product",
      [](const std::string& name, const py::sequence& x, const py::sequence& y) {
        const auto& L = *example(name).algebra;
        return vector_to(bch_product(L, vector_from(x, L.dim()), vector_from(y, L.dim())));
      },
      py::arg("example"), py::arg("x"), py::arg("y"), "log(exp x exp y) with exact rational coordinates.");

  m.def(
      "is_conjugate_in_G",
      [](const std::string& name, const py::sequence& x, const py::sequence& y) -> py::object {
        const auto& L = *example(name).algebra;
        const auto a = is_conjugate_in_G(L, vector_from(x, L.dim()), vector_from(y, L.dim()));
        if (!a) return py::none();
        return vector_to(*a);
      },
      py::arg("example"), py::arg("x"), py::arg("y"), "Some a with exp(a) exp(x) exp(-a) = exp(y), or None.");

  m.def(
      "multiplicity",
      [](const std::string& name, const std::string& lambda, int lattice) {
        const auto lam = Length::parse(lambda);
        const auto& ctx = context(name, lattice);
        SpectrumEntry e;
        {
          py::gil_scoped_release release;
          e = multiplicity_at(ctx, lam);
        }
        return entry_dict(e);
      },
      py::arg("example"), py::arg("lam"), py::arg("lattice") = 1,
      "Class counts at one length, e.g. multiplicity('IV', 'sqrt(4*pi*(7-pi))').");

  m.def(
      "heisenberg_central_lengths",
      [](const std::string& c) {
        std::vector<std::pair<std::string, double>> out;
        for (const auto& l : heisenberg_central_lengths(Rational::parse(c))) out.emplace_back(l.expr, l.value());
        return out;
      },
      py::arg("c"));

  m.def(
      "compare",
      [](const std::string& name, const std::string& window) {
        const auto& ex = example(name);
        const auto w = LengthWindow::parse(window.empty() ? ex.expected.lambda_window : window);
        const auto& a = context(name, 1);
        const auto& b = context(name, 2);
        ComparisonReport rep;
        {
          py::gil_scoped_release release;
          rep = compare_length_spectra(a, b, w);
        }
        py::dict d;
        d["same_length_spectrum"] = rep.same_length_spectrum();
        d["lengths_agree"] = rep.lengths_agree;
        d["central_columns_equal"] = rep.central_columns_equal;
        d["complete"] = rep.complete;
        d["differing"] = rep.differing ? py::object(py::str(rep.differing->expr)) : py::object(py::none());
        py::list rows;
        for (const auto& r : rep.rows) rows.append(py::make_tuple(r.lambda.expr, r.first.m_prime, r.first.m_dprime,
                                                                  r.second.m_prime, r.second.m_dprime));
        d["rows"] = rows;
        return d;
      },
      py::arg("example"), py::arg("window") = "");

  m.def(
      "translated_geodesic",
      [](const std::string& name, const std::vector<std::int64_t>& word, int lattice, double hint) -> py::object {
        const auto& ex = example(name);
        const Lattice& lat = lattice == 1 ? ex.lattice1 : ex.lattice2;
        if (word.size() != lat.rank()) throw std::invalid_argument("word needs " + std::to_string(lat.rank()) + " exponents");
        const Geometry g(*ex.algebra, ex.metric);
        const Vec gamma = g.to_frame(lat.word_to_element(IVector(word.begin(), word.end())));
        std::optional<TranslationCertificate> cert;
        {
          py::gil_scoped_release release;
          cert = find_translated_geodesic(g, gamma, hint > 0 ? hint : gamma.norm());
        }
        if (!cert) return py::none();
        py::dict d;
        d["lambda"] = cert->lambda;
        d["residual_translation"] = cert->residual_translation;
        d["residual_orthogonality"] = cert->residual_orthogonality;
        d["residual_horizontality"] =
            cert->residual_horizontality ? py::object(py::float_(*cert->residual_horizontality)) : py::object(py::none());
        d["velocity"] = std::vector<double>(cert->velocity.data(), cert->velocity.data() + cert->velocity.size());
        return d;
      },
      py::arg("example"), py::arg("word"), py::arg("lattice") = 1, py::arg("hint") = 0.0);

  m.def(
      "marking_passed",
      [](const std::string& name) {
        const auto& ex = example(name);
        if (!ex.phi) throw std::invalid_argument("example " + name + " has no morphism");
        std::optional<Factorization> f;
        if (ex.psi1 && ex.psi2) f = Factorization{*ex.psi1, *ex.psi2};
        return verify_marking(Morphism(ex.algebra, *ex.phi), ex.lattice1, ex.lattice2, ex.metric, f).passed();
      },
      py::arg("example"));

  m.def(
      "run",
      [](const std::vector<std::string>& args) {
        std::vector<std::string> full{"nilspec"};
        full.insert(full.end(), args.begin(), args.end());
        std::vector<const char*> argv;
        for (const auto& a : full) argv.push_back(a.c_str());
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line tool in process: (exit code, stdout, stderr).");
}
