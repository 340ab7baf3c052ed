#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mtq/quantization.hpp"
#include "mtq/spectral.hpp"

namespace py = pybind11;
using namespace mtq;

namespace {

// Python sees 1-based letters, as the CLI does.
Word from_py(const std::vector<int>& w) {
  Word out;
  out.reserve(w.size());
  for (int a : w) {
    if (a < 1) throw InputError("letters are 1-based");
    out.push_back(a - 1);
  }
  return out;
}

std::vector<int> to_py(const Word& w) {
  std::vector<int> out;
  out.reserve(w.size());
  for (int a : w) out.push_back(a + 1);
  return out;
}

py::dict flag_dict(const Flag& f) {
  py::list wit;
  for (const auto& [i, j] : f.witnesses) {
    if (j < 0)
      wit.append(i + 1);
    else
      wit.append(py::make_tuple(i + 1, j + 1));
  }
  py::dict d;
  d["pass"] = f.pass;
  d["witnesses"] = wit;
  return d;
}

SystemSpec fixture(const std::string& name, std::optional<double> ratio, double r, const std::string& chi) {
  if (name == "tuned-equal") return build_tuned_equal(ratio.value_or(0.25), r, 0.8);
  FixtureOptions o;
  o.ratio = ratio;
  o.r = r;
  o.chi = chi;
  return load_fixture(name, o);
}

}  // namespace

PYBIND11_MODULE(_mtq, m) {
  m.doc() = "Markov-type measures with complete overlaps: dimensions and quantization";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<CapExceeded>(m, "CapExceeded", PyExc_RuntimeError);

  py::class_<SystemSpec>(m, "SystemSpec")
      .def_readonly("name", &SystemSpec::name)
      .def_readonly("N", &SystemSpec::N)
      .def_readonly("r", &SystemSpec::r)
      .def_property_readonly("P", [](const SystemSpec& s) { return s.P; })
      .def_property_readonly("chi", [](const SystemSpec& s) { return s.chi; })
      .def_property_readonly("ratio", [](const SystemSpec& s) { return s.ratio; })
      .def_property_readonly("has_geometry", [](const SystemSpec& s) { return s.geometry.has_value(); })
      .def("__repr__", [](const SystemSpec& s) { return "<SystemSpec " + s.name + " N=" + std::to_string(s.N) + ">"; });

  m.def("fixture_names", [] {
    auto v = fixture_names();
    v.push_back("tuned-equal");
    return v;
  });
  m.def("load_fixture", &fixture, py::arg("name"), py::arg("ratio") = py::none(), py::arg("r") = 2.0,
        py::arg("chi") = "uniform-pair");
  m.def("load_json", &load_json_file, py::arg("path"));
  m.def("load_json_text", [](const std::string& t) { return load_json_text(t); }, py::arg("text"));
  m.def("build_tuned_equal", &build_tuned_equal, py::arg("c") = 0.25, py::arg("r") = 2.0, py::arg("beta") = 0.8);

  m.def("validate", [](const SystemSpec& s) {
    const auto rep = validate(s);
    py::dict d;
    d["A1"] = flag_dict(rep.A1);
    d["A2"] = flag_dict(rep.A2);
    d["A3"] = flag_dict(rep.A3);
    d["A4"] = flag_dict(rep.A4);
    d["A5"] = flag_dict(rep.A5);
    d["g1"] = flag_dict(rep.g1);
    d["g2"] = flag_dict(rep.g2);
    d["b1"] = flag_dict(rep.b1);
    d["b2"] = flag_dict(rep.b2);
    d["P_irreducible"] = rep.P_irreducible;
    d["complete_overlaps"] = rep.complete_overlaps;
    d["case"] = to_string(rep.kind);
    return d;
  });

  m.def("S_n", [](const SystemSpec& s, int n) {
    std::vector<std::vector<int>> out;
    for (const Word& w : enumerate_Sn(s.graph, n)) out.push_back(to_py(w));
    return out;
  });
  m.def("gamma", [](const SystemSpec& s, const std::vector<int>& sigma) {
    std::vector<std::vector<int>> out;
    for (const Word& w : gamma(from_py(sigma), s.graph)) out.push_back(to_py(w));
    return out;
  });
  m.def("in_S", [](const SystemSpec& s, const std::vector<int>& sigma) { return in_S(from_py(sigma), s.graph); });

  m.def(
      "mu", [](const SystemSpec& s, const std::vector<int>& sigma, const std::string& method) {
        if (method != "transfer" && method != "enumerate") throw InputError("method is 'transfer' or 'enumerate'");
        return mu_cylinder(from_py(sigma), s, method == "transfer" ? MuMethod::Transfer : MuMethod::Enumerate).mu;
      },
      py::arg("spec"), py::arg("sigma"), py::arg("method") = "transfer");
  m.def("mu_exact", [](const SystemSpec& s, const std::vector<int>& sigma) {
    const Rational q = mu_exact(from_py(sigma), s);
    return py::module_::import("fractions")
        .attr("Fraction")(py::int_(py::str(numerator(q).str())), py::int_(py::str(denominator(q).str())));
  });
  m.def("energy", [](const SystemSpec& s, const std::vector<int>& sigma) { return energy(from_py(sigma), s); });
  m.def("cycle_rate", [](const SystemSpec& s, const std::vector<int>& c) { return cycle_rate(from_py(c), s); });

  m.def(
      "reducibility", [](const SystemSpec& s, int depth) {
        const auto v = classify_reducibility(s, depth);
        py::dict d;
        d["status"] = to_string(v.status);
        d["certificate"] = v.certificate;
        d["sigma"] = to_py(v.sigma);
        d["j"] = v.j < 0 ? py::object(py::none()) : py::object(py::int_(v.j + 1));
        d["delta"] = v.delta;
        return d;
      },
      py::arg("spec"), py::arg("depth") = 12);

  m.def(
      "equivalence_probe", [](const SystemSpec& s, const std::string& surrogate, int max_len) {
        const auto rep = equivalence_probe(s, parse_surrogate(surrogate), max_len);
        py::list rows;
        for (const auto& c : rep.rows) {
          py::dict r;
          r["cycle"] = to_py(c.cycle);
          r["rate_mu"] = c.rate_mu;
          r["rate_surrogate"] = c.rate_surrogate;
          r["implied_zeta"] = c.implied_zeta;
          r["status"] = c.status;
          rows.append(r);
        }
        py::dict d;
        d["non_equivalent"] = rep.non_equivalent;
        d["reason"] = rep.reason;
        d["rows"] = rows;
        return d;
      },
      py::arg("spec"), py::arg("surrogate") = "ptilde", py::arg("max_len") = 3);

  m.def(
      "dimensions", [](const SystemSpec& s, int n_max) {
        const auto d = dimensions(s, n_max);
        py::dict out;
        out["case"] = to_string(d.kind);
        out["s1r"] = d.s1r;
        out["s2r"] = d.s2r;
        out["sr"] = d.sr;
        out["ar"] = d.ar ? py::object(py::float_(*d.ar)) : py::object(py::none());
        if (d.tr) {
          out["tr"] = d.tr->tr;
          out["tr_lo"] = d.tr->tr_lo;
          out["tr_hi"] = d.tr->tr_hi;
        } else {
          out["tr"] = py::none();
        }
        return out;
      },
      py::arg("spec"), py::arg("n_max") = 12);
  m.def(
      "solve_tr", [](const SystemSpec& s, int n_max) {
        const auto t = solve_tr(s, n_max);
        return py::make_tuple(t.tr_lo, t.tr, t.tr_hi);
      },
      py::arg("spec"), py::arg("n_max") = 12);
  m.def("strictness_test", [](const SystemSpec& s, double ar) {
    const auto t = strictness_test(s, ar);
    return py::make_tuple(t.certified, t.margin);
  });

  m.def(
      "antichain", [](const SystemSpec& s, int k, const std::vector<double>& s_values, const std::string& mode) {
        if (mode != "lumped" && mode != "dfs") throw InputError("mode is 'lumped' or 'dfs'");
        const auto st = antichain_stats(s, k, s_values, mode == "dfs" ? WalkMode::Dfs : WalkMode::Lumped);
        py::dict d;
        d["k"] = st.k;
        d["log_phi"] = st.log_phi;
        d["log_surrogate"] = st.log_surrogate;
        d["log_F"] = st.log_F;
        d["l1"] = st.l1;
        d["l2"] = st.l2;
        return d;
      },
      py::arg("spec"), py::arg("k"), py::arg("s_values") = std::vector<double>{}, py::arg("mode") = "lumped");

  m.def(
      "sample", [](const SystemSpec& s, std::size_t count, std::uint64_t seed, int depth) {
        const auto pts = sample_mu(s, count, depth, seed);
        const int q = s.geometry->q;
        Mat out(static_cast<Eigen::Index>(pts.size()), q);
        for (std::size_t i = 0; i < pts.size(); ++i)
          for (int c = 0; c < q; ++c) out(static_cast<Eigen::Index>(i), c) = pts[i][c];
        return out;
      },
      py::arg("spec"), py::arg("count"), py::arg("seed") = 1, py::arg("depth") = 0);

  m.def(
      "lloyd", [](const Mat& pts, int k, double r, std::uint64_t seed, int restarts) {
        if (pts.cols() < 1 || pts.cols() > 2) throw InputError("points must have 1 or 2 columns");
        std::vector<Point> v(static_cast<std::size_t>(pts.rows()));
        for (Eigen::Index i = 0; i < pts.rows(); ++i) v[i] = {pts(i, 0), pts.cols() > 1 ? pts(i, 1) : 0.0};
        LloydOptions o;
        o.q = static_cast<int>(pts.cols());
        o.restarts = restarts;
        const auto cb = lloyd(v, k, r, seed, o);
        Mat c(k, pts.cols());
        for (int i = 0; i < k; ++i)
          for (Eigen::Index j = 0; j < pts.cols(); ++j) c(i, j) = cb.centers[i][j];
        return py::make_tuple(c, cb.distortion, cb.monotone);
      },
      py::arg("points"), py::arg("k"), py::arg("r") = 2.0, py::arg("seed") = 1, py::arg("restarts") = 3);

  m.def(
      "empirical_dimension", [](const SystemSpec& s, const std::vector<int>& ks, std::size_t samples, std::uint64_t seed) {
        const auto ed = empirical_dimension(s, ks, samples, seed);
        py::dict d;
        d["slope"] = ed.fit.slope;
        d["r2"] = ed.fit.r2;
        d["ci"] = py::make_tuple(ed.ci_lo, ed.ci_hi);
        d["errors"] = ed.errors;
        return d;
      },
      py::arg("spec"), py::arg("ks"), py::arg("samples") = 200000, py::arg("seed") = 2024);
}
