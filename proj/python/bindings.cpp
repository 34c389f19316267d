#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cardfn/constructions.hpp"
#include "cardfn/counter.hpp"
#include "cardfn/error.hpp"
#include "cardfn/specfile.hpp"
#include "cardfn/topology.hpp"

namespace py = pybind11;

// Rationals cross the boundary as fractions.Fraction; int and str are
// accepted on input.
namespace pybind11::detail {
template <>
struct type_caster<cardfn::Rat> {
  PYBIND11_TYPE_CASTER(cardfn::Rat, const_name("fractions.Fraction"));

  bool load(handle src, bool) {
    if (!src || PyBool_Check(src.ptr()) || PyFloat_Check(src.ptr())) return false;
    std::string text;
    if (PyLong_Check(src.ptr()) || PyUnicode_Check(src.ptr())) {
      text = py::str(src);
    } else if (hasattr(src, "numerator") && hasattr(src, "denominator")) {
      text = std::string(py::str(src.attr("numerator"))) + "/" + std::string(py::str(src.attr("denominator")));
    } else {
      return false;
    }
    try {
      value = cardfn::parse_rat(text);
    } catch (const cardfn::Error&) {
      return false;
    }
    return true;
  }

  static handle cast(const cardfn::Rat& src, return_value_policy, handle) {
    static py::object fraction = py::module_::import("fractions").attr("Fraction");
    return fraction(cardfn::to_string(src)).release();
  }
};
}  // namespace pybind11::detail

namespace {

using namespace cardfn;

PyObject* error_type = nullptr;

CountOptions options_from(std::optional<std::size_t> budget, std::optional<std::size_t> witnesses) {
  CountOptions o;
  if (budget) o.budget = *budget;
  if (witnesses) o.witnesses = *witnesses;
  return o;
}

std::vector<std::string> rep_strings(const std::vector<Representation>& reps) {
  std::vector<std::string> out;
  for (const auto& r : reps) out.push_back(to_string(r));
  return out;
}

const char* kind_name(Cardinality::Kind k) {
  switch (k) {
    case Cardinality::Kind::Fin: return "fin";
    case Cardinality::Kind::AtLeast: return "at_least";
    case Cardinality::Kind::Infinite: return "infinite";
    case Cardinality::Kind::Omega: return "omega";
    case Cardinality::Kind::Continuum: return "continuum";
  }
  return "";
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Cardinal functions of convergent series of positive rationals";

  error_type = PyErr_NewException("cardfn.CardfnError", PyExc_ValueError, nullptr);
  m.add_object("CardfnError", py::handle(error_type));
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object inst = py::handle(error_type)(e.what());
      inst.attr("kind") = to_string(e.kind());
      PyErr_SetObject(error_type, inst.ptr());
    }
  });

  py::class_<Cardinality>(m, "Cardinality")
      .def_static("fin", &Cardinality::fin)
      .def_static("at_least", &Cardinality::at_least)
      .def_static("infinite", &Cardinality::infinite)
      .def_static("omega", &Cardinality::omega)
      .def_static("continuum", &Cardinality::continuum)
      .def_static("parse", [](const std::string& text) {
        auto c = parse_cardinality(text);
        if (!c) throw Error(ErrorKind::Parse, "bad cardinality: " + text);
        return *c;
      })
      .def_property_readonly("kind", [](const Cardinality& c) { return kind_name(c.kind()); })
      .def_property_readonly("count", &Cardinality::count)
      .def_property_readonly("is_exact", &Cardinality::is_exact)
      .def_property_readonly("is_infinite", &Cardinality::is_infinite)
      .def("pretty", &Cardinality::pretty)
      .def("__str__", &Cardinality::to_string)
      .def("__repr__", [](const Cardinality& c) { return "Cardinality(" + c.to_string() + ")"; })
      .def("__eq__", [](const Cardinality& a, const Cardinality& b) { return a == b; })
      .def("__hash__", [](const Cardinality& c) { return std::hash<std::string>{}(c.to_string()); });

  py::class_<SeriesSpec>(m, "Series")
      .def_static("preset", &preset, py::arg("name"))
      .def_static("parse", [](const std::string& text) { return parse_spec(text); }, py::arg("text"))
      .def_static("load", &load_spec_file, py::arg("path"))
      .def_static(
          "geometric",
          [](const Rat& c, const Rat& q, std::vector<Rat> prefix) {
            SeriesSpec s{std::move(prefix), GeometricTail{c, q}, std::nullopt};
            require_valid(s);
            return s;
          },
          py::arg("c"), py::arg("q"), py::arg("prefix") = std::vector<Rat>{})
      .def_static(
          "multigeometric",
          [](std::vector<Rat> coeffs, const Rat& q, std::vector<Rat> prefix) {
            SeriesSpec s{std::move(prefix), MultigeometricTail{std::move(coeffs), q}, std::nullopt};
            require_valid(s);
            return s;
          },
          py::arg("coeffs"), py::arg("q"), py::arg("prefix") = std::vector<Rat>{})
      .def_static(
          "finite",
          [](std::vector<Rat> atoms) {
            SeriesSpec s{std::move(atoms), ZeroTail{}, std::nullopt};
            require_valid(s);
            return s;
          },
          py::arg("atoms"))
      .def_readonly("prefix", &SeriesSpec::prefix)
      .def_readonly("label", &SeriesSpec::label)
      .def("term", &term, py::arg("n"))
      .def(
          "remainder",
          [](const SeriesSpec& s, std::uint64_t n) -> py::object {
            const auto r = remainder(s, n);
            if (r.is_exact()) return py::cast(r.value());
            return py::make_tuple(r.lo(), r.hi());
          },
          py::arg("n"), "Exact value, or a (lo, hi) enclosure for block tails.")
      .def("total", [](const SeriesSpec& s) -> py::object {
        const auto r = total(s);
        if (r.is_exact()) return py::cast(r.value());
        return py::make_tuple(r.lo(), r.hi());
      })
      .def("render", &render_spec)
      .def("__eq__", [](const SeriesSpec& a, const SeriesSpec& b) { return a == b; })
      .def("__repr__", [](const SeriesSpec& s) {
        return "<Series " + (s.label ? *s.label : describe(s.tail)) + ">";
      });

  py::class_<CountResult>(m, "CountResult")
      .def_readonly("cardinality", &CountResult::cardinality)
      .def_property_readonly("witnesses", [](const CountResult& r) { return rep_strings(r.witnesses); })
      .def_readonly("truncated", &CountResult::truncated)
      .def_readonly("states", &CountResult::states)
      .def_readonly("budget_exceeded", &CountResult::budget_exceeded)
      .def_readonly("note", &CountResult::note);

  m.def(
      "count",
      [](const SeriesSpec& s, const Rat& t, std::optional<std::size_t> budget, std::optional<std::size_t> witnesses) {
        return count(s, t, options_from(budget, witnesses));
      },
      py::arg("series"), py::arg("target"), py::arg("budget") = py::none(), py::arg("witnesses") = py::none());

  m.def(
      "enumerate",
      [](const SeriesSpec& s, const Rat& t, std::size_t limit, std::optional<std::size_t> budget) {
        const auto r = enumerate_reps(s, t, limit, options_from(budget, std::nullopt));
        return py::make_tuple(rep_strings(r.reps), r.cardinality, r.truncated);
      },
      py::arg("series"), py::arg("target"), py::arg("limit") = 16, py::arg("budget") = py::none(),
      "Returns (representations, cardinality, truncated).");

  m.def(
      "range_scan",
      [](const SeriesSpec& s, std::size_t depth, std::vector<Rat> targets, std::optional<std::size_t> budget) {
        const auto r = range_scan(s, depth, options_from(budget, std::nullopt), targets);
        py::dict entries;
        for (const auto& [t, e] : r.entries) entries[py::cast(t)] = py::cast(e.cardinality);
        py::dict out;
        out["entries"] = entries;
        out["cardinality_set"] = std::vector<Cardinality>(r.cardinality_set.begin(), r.cardinality_set.end());
        out["states"] = r.states;
        out["budget_limited"] = r.budget_limited;
        return out;
      },
      py::arg("series"), py::arg("depth") = 8, py::arg("targets") = std::vector<Rat>{},
      py::arg("budget") = py::none());

  m.def(
      "convergence_profile",
      [](const SeriesSpec& s) {
        const auto p = convergence_profile(s);
        py::dict out;
        out["quick"] = to_string(p.quick);
        out["slow_from"] = p.slow_from;
        out["A"] = to_string(p.property_A);
        out["B"] = to_string(p.property_B);
        out["witnesses"] = p.witnesses;
        return out;
      },
      py::arg("series"));

  m.def(
      "classify",
      [](const SeriesSpec& s) {
        const auto c = classify(s);
        py::dict out;
        out["kind"] = to_string(c.kind);
        out["components"] = c.components;
        py::list intervals;
        for (const auto& iv : c.intervals) intervals.append(py::make_tuple(iv.lo, iv.hi));
        out["intervals"] = intervals;
        out["decided_from"] = c.decided_from;
        return out;
      },
      py::arg("series"));

  m.def(
      "cover",
      [](const SeriesSpec& s, std::size_t depth) {
        py::list out;
        for (const auto& iv : cover(s, depth)) out.append(py::make_tuple(iv.lo, iv.hi));
        return out;
      },
      py::arg("series"), py::arg("depth"));

  m.def(
      "gaps",
      [](const SeriesSpec& s, std::size_t depth) {
        const auto g = gaps(s, depth);
        py::list list;
        for (const auto& gap : g.gaps) list.append(py::make_tuple(gap.lo, gap.hi, gap.certified));
        py::dict out;
        out["gaps"] = list;
        out["leftmost_longest"] = g.leftmost_longest;
        out["form_index"] = g.form_index;
        return out;
      },
      py::arg("series"), py::arg("depth"));

  m.def("omega_witness", [](const SeriesSpec& s) { return omega_witness(s).t; }, py::arg("series"));

  m.def("preset_names", &preset_names);
  m.def("unique_base", &unique_base);
  m.def("interleave", &interleave, py::arg("base"));
  m.def(
      "double_terms",
      [](const SeriesSpec& s) {
        auto d = double_terms(s);
        return py::make_tuple(std::move(d.spec), d.continuum_on_interior);
      },
      py::arg("series"));
  m.def("prepend_scaled", &prepend_scaled, py::arg("series"), py::arg("multipliers"));
  m.def("add_total", &add_total, py::arg("series"));
  m.def("add_two_totals", &add_two_totals, py::arg("series"));
  m.def("add_m_totals", &add_m_totals, py::arg("series"), py::arg("m"));
  m.def("add_m_double_totals", &add_m_double_totals, py::arg("series"), py::arg("m"));
  m.def("product", &product, py::arg("tau"), py::arg("nu"));

  m.def(
      "finite_range",
      [](const FiniteMeasure& atoms) {
        const auto r = finite_range(atoms);
        return py::make_tuple(r.counts, r.range);
      },
      py::arg("atoms"), "Returns (subset sum -> number of subsets, range).");

  m.def(
      "search_finite_ranges",
      [](const std::set<std::uint64_t>& target, std::size_t max_atoms, std::uint64_t denominators,
         bool distinct_filter) {
        SearchOptions o;
        o.distinct_filter = distinct_filter;
        return search_finite_ranges(target, max_atoms, denominators, o);
      },
      py::arg("target"), py::arg("max_atoms"), py::arg("denominators"), py::arg("distinct_filter") = true);
}
