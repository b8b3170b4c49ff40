#include "bcolab/body.hpp"
#include "bcolab/cli.hpp"
#include "bcolab/error.hpp"
#include "bcolab/explore.hpp"
#include "bcolab/geometry.hpp"
#include "bcolab/ids_bandit.hpp"
#include "bcolab/lemma_lab.hpp"
#include "bcolab/msa.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace bcolab;

namespace {

py::dict report_dict(const lab::VerificationReport& r) {
  py::dict d;
  d["property"] = r.property;
  d["trials"] = r.trials;
  d["failures"] = r.failures;
  d["rejections"] = r.rejections;
  d["worst_margin"] = r.worst_margin;
  d["worst_trial"] = r.worst_trial;
  d["seed"] = r.seed;
  d["tolerance"] = r.tolerance;
  d["passed"] = r.passed();
  d["csv_row"] = lab::csv_row(r);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Convex geometry, exploration and IDS simulation kernels";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error;
  error.call_once_and_store_result([&] { return py::exception<Error>(m, "Error"); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error.get_stored(), e.what());
    }
  });

  py::class_<ConvexBody>(m, "ConvexBody")
      .def_static("box", &ConvexBody::box, py::arg("lo"), py::arg("hi"))
      .def_static("interval", &ConvexBody::interval, py::arg("lo"), py::arg("hi"))
      .def_static("ball", &ConvexBody::ball, py::arg("center"), py::arg("radius"))
      .def_static("ellipsoid", &ConvexBody::ellipsoid, py::arg("center"), py::arg("shape"))
      .def_static("from_vertices", &ConvexBody::from_vertices, py::arg("points"))
      .def_static(
          "polytope",
          [](const Matrix& normals, const Vector& offsets) {
            std::vector<Halfspace> hs;
            for (Eigen::Index i = 0; i < normals.rows(); ++i) hs.push_back({normals.row(i).transpose(), offsets[i]});
            return ConvexBody::polytope(std::move(hs));
          },
          py::arg("normals"), py::arg("offsets"))
      .def_property_readonly("dim", &ConvexBody::dim)
      .def_property_readonly("vertices", &ConvexBody::vertices)
      .def("contains", &ConvexBody::contains, py::arg("x"), py::arg("tol") = 0.0)
      .def("diameter", &ConvexBody::diameter)
      .def("transformed", &ConvexBody::transformed, py::arg("t"));

  m.def(
      "ray_clip",
      [](const ConvexBody& k, const Vector& o, const Vector& u) {
        const auto iv = ray_clip(k, o, u);
        return py::make_tuple(iv.t_in, iv.t_out);
      },
      py::arg("body"), py::arg("origin"), py::arg("direction"));
  m.def("project", &project, py::arg("x"), py::arg("y"));
  m.def("pi_far", &pi_far, py::arg("body"), py::arg("x"), py::arg("z"));
  m.def("psi_point", &psi_point, py::arg("body"), py::arg("x"), py::arg("z"));
  m.def(
      "psi_avg",
      [](const ConvexBody& k, const Vector& x, std::size_t samples, std::uint64_t seed) {
        const auto r = psi_avg(k, x, samples, seed);
        py::dict d;
        d["point"] = r.point_value;
        d["avg"] = r.avg_value;
        d["max"] = r.max_value;
        d["samples"] = r.mc_samples;
        d["stderr"] = r.mc_stderr;
        return d;
      },
      py::arg("body"), py::arg("x"), py::arg("samples") = 4096, py::arg("seed") = 0);

  m.def(
      "msa_transform",
      [](const ConvexBody& k) {
        const auto r = msa_transform(k);
        py::dict d;
        d["T"] = r.transform;
        d["residual"] = r.residual;
        d["iterations"] = r.iterations;
        d["converged"] = r.converged;
        return d;
      },
      py::arg("polytope"));
  m.def(
      "isotropy_residual", [](const ConvexBody& k) { return isotropy_residual(surface_measure(k)); },
      py::arg("polytope"));

  m.def(
      "epsilon_grid",
      [](int d, int n, double mod) {
        const auto g = epsilon_grid(d, n, mod);
        py::dict out;
        out["eps0"] = g.eps0;
        out["gamma"] = g.gamma;
        out["levels"] = g.levels;
        return out;
      },
      py::arg("d"), py::arg("n"), py::arg("m"));

  m.def("properties", [] {
    std::vector<std::string> ids;
    for (const auto& p : lab::properties()) ids.push_back(p.id);
    return ids;
  });
  m.def(
      "run_property",
      [](const std::string& id, std::size_t trials, std::uint64_t seed, unsigned jobs) {
        py::gil_scoped_release release;
        auto r = lab::run_property(id, trials ? trials : lab::property(id).default_trials, seed, jobs);
        py::gil_scoped_acquire acquire;
        return report_dict(r);
      },
      py::arg("id"), py::arg("trials") = 0, py::arg("seed") = 0, py::arg("jobs") = 1);
  m.def(
      "replay_trial",
      [](const std::string& id, std::uint64_t seed, std::size_t trial) {
        std::ostringstream os;
        const auto t = lab::replay_trial(id, seed, trial);
        lab::print_outcome(os, id, t);
        return py::make_tuple(!t.failed(), os.str());
      },
      py::arg("id"), py::arg("seed"), py::arg("trial"));

  m.def("regret_bound", &ids::regret_bound, py::arg("n"), py::arg("d"), py::arg("alpha"), py::arg("beta"),
        py::arg("diam"));
  m.def(
      "run_sweep",
      [](int n, int atoms, std::size_t seeds, std::uint64_t seed, const std::string& mode) {
        ids::SweepConfig cfg;
        cfg.n = n;
        cfg.atoms = atoms;
        cfg.seeds = seeds;
        cfg.seed = seed;
        cfg.mode = ids::parse_mode(mode);
        ids::SweepSummary s;
        {
          py::gil_scoped_release release;
          s = ids::run_sweep(cfg);
        }
        py::dict d;
        d["seeds"] = s.seeds;
        d["mean_regret"] = s.mean_regret;
        d["regret_se"] = s.regret_se;
        d["bound_value"] = s.bound_value;
        d["beta_hat"] = s.beta_hat;
        d["cover_size"] = s.cover_size;
        d["cover_radius"] = s.cover_radius;
        d["mean_sum_2v"] = s.mean_sum_2v;
        d["log_cover"] = s.log_cover;
        return d;
      },
      py::arg("n") = 200, py::arg("atoms") = 8, py::arg("seeds") = 100, py::arg("seed") = 0,
      py::arg("mode") = "ids-opt");

  m.def(
      "cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "bcolab");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
