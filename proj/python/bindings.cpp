#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "rbsim/analysis.hpp"
#include "rbsim/commands.hpp"
#include "rbsim/config.hpp"
#include "rbsim/error.hpp"

namespace py = pybind11;
using namespace rbsim;

namespace {

py::dict fit_dict(const FitResult& f) {
  py::dict params;
  for (size_t i = 0; i < f.names.size(); ++i) params[py::str(f.names[i])] = py::make_tuple(f.params[i], f.std_errors[i]);
  py::dict d;
  d["params"] = params;
  d["chi2"] = f.chi2;
  d["dof"] = f.dof;
  d["converged"] = f.converged;
  d["iterations"] = f.iterations;
  d["diagnostic"] = f.diagnostic;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Randomized-benchmarking simulator for a trapped-atom qubit";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<InvalidParameter>(m, "InvalidParameter", PyExc_ValueError);
  py::register_exception<InvalidData>(m, "InvalidData", PyExc_ValueError);

  py::class_<RunConfig>(m, "RunConfig")
      .def_readwrite("seed", &RunConfig::seed)
      .def_readwrite("output_dir", &RunConfig::output_dir)
      .def_property(
          "experiment",
          [](const RunConfig& c) -> std::optional<std::string> {
            if (!c.experiment) return std::nullopt;
            return to_string(*c.experiment);
          },
          [](RunConfig& c, std::optional<std::string> s) {
            c.experiment = s ? std::optional(experiment_kind_from_string(*s)) : std::nullopt;
          })
      .def("validate", &RunConfig::validate)
      .def("__eq__", [](const RunConfig& a, const RunConfig& b) { return a == b; })
      .def("__str__", &serialize_config);

  m.def("default_config", &RunConfig::defaults);
  m.def("parse_config", &parse_config, py::arg("text"));
  m.def("load_config", &load_config, py::arg("path"));
  m.def("serialize_config", &serialize_config, py::arg("config"));

  py::class_<FitResult>(m, "FitResult");

  py::class_<CliffordTable>(m, "CliffordTable")
      .def(py::init(&CliffordTable::generate))
      .def("__len__", &CliffordTable::size)
      .def("compose", &CliffordTable::compose, py::arg("a"), py::arg("b"))
      .def("inverse", &CliffordTable::inverse, py::arg("g"));

  py::class_<PulseTable>(m, "PulseTable")
      .def(py::init([](const CliffordTable& c, const std::string& objective) {
             return PulseTable::build(c, decomposition_objective_from_string(objective));
           }),
           py::arg("cliffords"), py::arg("objective") = "min_pulse_count")
      .def("__len__", &PulseTable::size)
      .def("word", [](const PulseTable& p, int g) { return word_to_string(p.word(g)); }, py::arg("clifford"))
      .def("quarter_turns", &PulseTable::quarter_turns, py::arg("clifford"));

  m.def("rb_survival_model", &rb_survival_model, py::arg("length"), py::arg("eps_g"), py::arg("d_if"));
  m.def("eq2_error", &eq2_error, py::arg("t_cg"), py::arg("eta"), py::arg("t2s"));
  m.def("invert_eta", &invert_eta, py::arg("t_cg"), py::arg("t2s"), py::arg("eps_g"));
  m.def(
      "fit_eta",
      [](const std::vector<std::tuple<double, double, double>>& points, double t_cg) {
        std::vector<CoherencePoint> pts;
        for (auto [t2s, eps, sigma] : points) pts.push_back({t2s, eps, sigma});
        return fit_dict(fit_eta(pts, t_cg));
      },
      py::arg("points"), py::arg("t_cg"), "points: list of (t2s, eps_g, sigma)");

  // Simulates and fits one RB run of `config`; returns the per-length means
  // and the fit.
  m.def(
      "run_rb",
      [](const RunConfig& cfg, int workers) {
        cfg.validate();
        const auto cliffords = CliffordTable::generate();
        const auto pulses = PulseTable::build(cliffords, cfg.decomposition);
        RBConfig rb = cfg.rb;
        rb.seed = cfg.seed;
        RBHooks hooks;
        hooks.workers = workers;
        RBDataset ds;
        {
          py::gil_scoped_release release;
          ds = run_rb(rb, cfg.noise, cliffords, pulses, hooks);
        }
        py::list lengths, means, errors;
        for (const auto& p : ds.points) {
          lengths.append(p.length);
          means.append(p.mean);
          errors.append(p.std_error);
        }
        py::dict d;
        d["lengths"] = lengths;
        d["mean"] = means;
        d["std_error"] = errors;
        d["mean_gate_time"] = ds.mean_gate_time;
        d["fit"] = fit_dict(fit_rb_decay(ds));
        return d;
      },
      py::arg("config"), py::arg("workers") = 1);

  // Same as the command-line tool: writes files into out_dir and returns
  // (exit_code, files, message).
  m.def(
      "run",
      [](const std::string& command, const RunConfig& cfg, std::optional<std::filesystem::path> out_dir, int workers,
         bool zero_noise, std::optional<uint64_t> seed) {
        CommandOptions opts{out_dir, workers, zero_noise, seed};
        CommandResult r;
        {
          py::gil_scoped_release release;
          if (command == "tables")
            r = cmd_tables(cfg, opts);
          else
            r = run_experiment(experiment_kind_from_string(command), cfg, opts);
        }
        return py::make_tuple(r.exit_code, r.files, r.message);
      },
      py::arg("command"), py::arg("config"), py::arg("out_dir") = std::nullopt, py::arg("workers") = 1,
      py::arg("zero_noise") = false, py::arg("seed") = std::nullopt);
}
