#include <sstream>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "gravphase/config.hpp"
#include "gravphase/core.hpp"
#include "gravphase/errors.hpp"
#include "gravphase/gaussian.hpp"
#include "gravphase/run.hpp"
#include "gravphase/snapshot.hpp"
#include "gravphase/witness.hpp"

namespace py = pybind11;
using namespace gravphase;

namespace {

py::dict snapshot_to_dict(const Snapshot& s) {
    py::dict d;
    d["kind"] = static_cast<int>(s.header.kind);
    d["time"] = s.header.time;
    d["digest"] = s.header.digest;
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, WavefunctionState>) {
                d["grid"] = py::make_tuple(x.grid.min, x.grid.max, x.grid.n);
                d["values"] = py::array_t<std::complex<double>>(static_cast<py::ssize_t>(x.psi.size()), x.psi.data());
            } else if constexpr (std::is_same_v<T, WignerField>) {
                d["r"] = py::make_tuple(x.grid.r.min, x.grid.r.max, x.grid.r.n);
                d["p"] = py::make_tuple(x.grid.p.min, x.grid.p.max, x.grid.p.n);
                py::array_t<double> a({static_cast<py::ssize_t>(x.grid.r.n), static_cast<py::ssize_t>(x.grid.p.n)});
                std::copy(x.values.begin(), x.values.end(), a.mutable_data());
                d["values"] = a;
            } else if constexpr (std::is_same_v<T, WeylMatrix>) {
                const auto n = static_cast<py::ssize_t>(x.rho.rows());
                py::array_t<std::complex<double>> a({n, n});
                for (py::ssize_t i = 0; i < n; ++i)
                    for (py::ssize_t j = 0; j < n; ++j) a.mutable_at(i, j) = x.rho(i, j);
                d["values"] = a;
                d["leakage"] = x.leakage;
            } else {
                py::array_t<double> a({4, 4});
                for (int i = 0; i < 4; ++i)
                    for (int j = 0; j < 4; ++j) a.mutable_at(i, j) = x.sigma(i, j);
                d["values"] = a;
            }
        },
        s.data);
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Phase-space simulator bindings";

    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<SnapshotError>(m, "SnapshotError", PyExc_IOError);

    py::class_<PhysicalParams>(m, "PhysicalParams")
        .def(py::init<>())
        .def_readwrite("m", &PhysicalParams::m)
        .def_readwrite("L", &PhysicalParams::L)
        .def_readwrite("sigma", &PhysicalParams::sigma)
        .def_readwrite("pbar", &PhysicalParams::pbar)
        .def_readwrite("G", &PhysicalParams::G)
        .def_readwrite("hbar", &PhysicalParams::hbar)
        .def_readwrite("N", &PhysicalParams::N)
        .def_readwrite("theta", &PhysicalParams::theta)
        .def("validate", &PhysicalParams::validate);

    py::class_<DerivedScales>(m, "DerivedScales")
        .def_readonly("omega", &DerivedScales::omega)
        .def_readonly("mu", &DerivedScales::mu)
        .def_readonly("sigma_r", &DerivedScales::sigma_r)
        .def_readonly("sigma_p", &DerivedScales::sigma_p)
        .def_readonly("xunit", &DerivedScales::xunit)
        .def_readonly("punit", &DerivedScales::punit)
        .def_readonly("epsilon", &DerivedScales::epsilon);

    m.def("derive_scales", &derive_scales, py::arg("params"), py::arg("t_ref") = 0.0);
    m.def("perturbation_strength", &perturbation_strength);
    m.def("log_negativity_at", &log_negativity_at, py::arg("n1"), py::arg("n2"), py::arg("t"), py::arg("params"));
    m.def("dawson", &dawson);
    m.def("pattern_function", &pattern_function, py::arg("y"), py::arg("delta"));

    py::class_<PerturbativeEstimate>(m, "PerturbativeEstimate")
        .def_readonly("epsilon", &PerturbativeEstimate::epsilon)
        .def_readonly("p0", &PerturbativeEstimate::p0)
        .def_readonly("tail_min", &PerturbativeEstimate::tail_min)
        .def_readonly("delta_star", &PerturbativeEstimate::delta_star)
        .def_readonly("n_opt", &PerturbativeEstimate::n_opt);
    m.def("perturbative_wigner", &perturbative_wigner);

    m.def("config_digest", [](const std::string& text) { return config_digest(parse_config(text)); });
    m.def(
        "run",
        [](const std::string& text, const std::string& output) {
            RunConfig cfg = parse_config(text);
            cfg.output = output;
            std::ostringstream log;
            const RunOutcome o = run(cfg, log);
            std::vector<std::string> files;
            for (const auto& f : o.files) files.push_back(f.string());
            return files;
        },
        py::arg("config_text"), py::arg("output"), "Run a config given as text; returns the files written.");
    m.def(
        "read_snapshot", [](const std::string& path) { return snapshot_to_dict(read_snapshot(path)); },
        py::arg("path"));
}
