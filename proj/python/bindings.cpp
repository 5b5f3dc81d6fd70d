#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/stl.h>
#include <pybind11/pybind11.h>

#include "akim/cli.hpp"
#include "akim/diagnostics.hpp"
#include "akim/duality.hpp"
#include "akim/reduced_dynamics.hpp"

namespace py = pybind11;
using namespace akim;

namespace {

PureState to_state(const Vector& amp) {
    const int n = static_cast<int>(std::lround(std::log2(static_cast<double>(amp.size()))));
    if (amp.size() != (Eigen::Index{1} << n)) throw ArgumentError("state length must be a power of two");
    return PureState(n, amp);
}

DensityMatrix to_density(const Matrix& m) {
    const int n = static_cast<int>(std::lround(std::log2(static_cast<double>(m.rows()))));
    return DensityMatrix(n, m);
}

py::dict check_dict(const CheckResult& c) {
    py::dict d;
    d["pass"] = c.pass;
    d["residual"] = c.residual;
    d["parts"] = c.parts;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Exact numerics for the alternating kicked Ising model";
    m.attr("__version__") = cli::kVersion;

    py::register_exception<ArgumentError>(m, "ArgumentError", PyExc_ValueError);
    py::register_exception<CapacityError>(m, "CapacityError", PyExc_OverflowError);

    py::class_<GatePhases>(m, "GatePhases")
        .def(py::init<double, double>(), py::arg("g0"), py::arg("g1"))
        .def_readonly("g0", &GatePhases::g0)
        .def_readonly("g1", &GatePhases::g1)
        .def("__repr__", [](const GatePhases& g) {
            return "GatePhases(" + cli::format_number(g.g0) + ", " + cli::format_number(g.g1) + ")";
        });
    py::implicitly_convertible<py::tuple, GatePhases>();

    m.def("parse_angle", &cli::parse_angle);
    m.def("build_gate", [](double g0, double g1) { return Matrix(build_gate({g0, g1})); }, py::arg("g0"),
          py::arg("g1"));
    m.def("check_2du", [](double g0, double g1, double tol) { return check_dict(check_2du({g0, g1}, tol)); },
          py::arg("g0"), py::arg("g1"), py::arg("tol") = 1e-10);
    m.def("check_clifford", [](const Matrix& u, double tol) { return check_clifford(Matrix4(u), tol); },
          py::arg("u"), py::arg("tol") = 1e-10);
    m.def(
        "check_sic",
        [](const Vector2& a, const Vector2& b, double g0, double g1, double tol) {
            return check_dict(check_sic(a, b, {g0, g1}, tol));
        },
        py::arg("phi0"), py::arg("phi1"), py::arg("g0"), py::arg("g1"), py::arg("tol") = 1e-10);
    m.def(
        "check_sec",
        [](const Vector2& a, const Vector2& b, double g0, double g1, double tol) {
            return check_dict(check_sec(a, b, {g0, g1}, tol));
        },
        py::arg("phi0"), py::arg("phi1"), py::arg("g0"), py::arg("g1"), py::arg("tol") = 1e-10);
    m.def("parse_dimer", &cli::parse_dimer, py::arg("descriptor"));
    m.def(
        "parse_state", [](const std::string& d, int n) { return Vector(cli::parse_state(d, n).amplitudes); },
        py::arg("descriptor"), py::arg("n"));
    m.def(
        "scan_bloch_grid",
        [](double g0, double g1, int resolution, const std::string& target) {
            if (target != "sic" && target != "sec") throw ArgumentError("target must be 'sic' or 'sec'");
            py::list out;
            for (const auto& h : scan_bloch_grid({g0, g1}, resolution,
                                                 target == "sic" ? ScanTarget::sic : ScanTarget::sic_and_sec))
                out.append(py::make_tuple(h.theta0, h.phi0, h.theta1, h.phi1, h.residual_sic, h.residual_sec));
            return out;
        },
        py::arg("g0"), py::arg("g1"), py::arg("resolution") = 8, py::arg("target") = "sec",
        "Refined hits as (theta0, phi0, theta1, phi1, residual_sic, residual_sec).");

    m.def(
        "quench_oracle",
        [](int n_a, const Vector& psi, const Vector2& a, const Vector2& b, double g0, double g1, int t, int margin) {
            return quench_oracle(n_a, to_state(psi), a, b, {g0, g1}, t, {margin}).matrix;
        },
        py::arg("n_a"), py::arg("psi"), py::arg("phi0"), py::arg("phi1"), py::arg("g0"), py::arg("g1"), py::arg("t"),
        py::arg("margin") = 2);
    m.def(
        "rdm_via_im",
        [](const Vector& psi, int t, double g0, double g1) { return rdm_via_im(to_state(psi), t, {g0, g1}).matrix; },
        py::arg("psi"), py::arg("t"), py::arg("g0"), py::arg("g1"));
    m.def(
        "transfer_matrix",
        [](int t, double g0, double g1, const Vector2& a, const Vector2& b) {
            return build_transfer_matrix(t, {g0, g1}, a, b).matrix;
        },
        py::arg("t"), py::arg("g0"), py::arg("g1"), py::arg("phi0"), py::arg("phi1"));
    m.def("bell_product_im", [](int t) { return bell_product_im(t).v; }, py::arg("t"));

    py::class_<Channel>(m, "Channel")
        .def(py::init([](int n_a, double g0, double g1) { return build_channel(n_a, {g0, g1}); }), py::arg("n_a"),
             py::arg("g0"), py::arg("g1"))
        .def_readonly("n", &Channel::n)
        .def_readonly("kraus", &Channel::kraus)
        .def("apply", &Channel::apply, py::arg("rho"))
        .def("apply_power", &Channel::apply_power, py::arg("rho"), py::arg("k"))
        .def("spectrum", [](const Channel& c) {
            const Channel d = c.superop ? c : build_channel(c.n, c.phases, true);
            const ChannelSpectrum s = channel_spectrum(d);
            py::dict out;
            out["eigenvalues"] = s.eigenvalues;
            out["gap"] = s.gap;
            out["fixed_dimension"] = s.fixed_dimension;
            out["stabilization_index"] = s.stabilization_index;
            return out;
        });
    m.def(
        "finite_time_identity",
        [](char c, int n_a, double g0, double g1) {
            const auto r = finite_time_identity(c, n_a, {g0, g1});
            return py::make_tuple(r.k, r.residual, r.residual_before, r.fixed_dimension);
        },
        py::arg("case"), py::arg("n_a"), py::arg("g0"), py::arg("g1"),
        "Returns (k, |C^{k+1} - C^k|, |C^k - C^{k-1}|, fixed-space dimension).");

    m.def("entropy", [](const Matrix& rho, double order) { return entropy(to_density(rho), order); },
          py::arg("rho"), py::arg("order") = 1.0);
    m.def(
        "trajectory",
        [](int n_a, double g0, double g1, const Vector& psi, int t_max, const std::string& reference) {
            const auto r = entanglement_trajectory(n_a, {g0, g1}, to_state(psi), t_max, parse_reference(reference));
            py::dict out;
            out["entropy"] = r.entropy;
            out["expected"] = r.expected;
            out["flat"] = r.flat;
            out["max_deviation"] = r.max_deviation;
            return out;
        },
        py::arg("n_a"), py::arg("g0"), py::arg("g1"), py::arg("psi"), py::arg("t_max"), py::arg("reference") = "none");
    m.def(
        "sff",
        [](int L, const std::string& ensemble, int samples, std::uint64_t seed, int t_max, bool periodic) {
            EnsembleSpec e;
            e.L = L;
            e.mode = parse_ensemble(ensemble);
            e.samples = samples;
            e.seed = seed;
            e.boundary = periodic ? Boundary::periodic : Boundary::open;
            const SFFSeries s = sff(e, t_max);
            return py::make_tuple(s.mean, s.stderr_);
        },
        py::arg("L"), py::arg("ensemble") = "random", py::arg("samples") = 1000, py::arg("seed") = 0,
        py::arg("t_max") = 100, py::arg("periodic") = true, "Returns (mean K(t), standard error) for t = 0..t_max.");
    m.def("coe_reference", &coe_reference, py::arg("t"), py::arg("n_qubits"));
    m.def(
        "stabilizer_decomposition",
        [](const Matrix& rho, double tol) {
            const StabilizerSet s = stabilizer_decomposition(to_density(rho), tol);
            py::dict out;
            out["operators"] = s.operators;
            out["labels"] = s.labels;
            out["residual"] = s.residual;
            py::list prof;
            for (int cut = 1; cut < s.n; ++cut) prof.append(stabilizer_opent_profile(s, cut));
            out["operator_entanglement"] = prof;
            return out;
        },
        py::arg("rho"), py::arg("tol") = 1e-9);

    m.def(
        "run",
        [](const std::vector<std::string>& args) {
            py::gil_scoped_release release;
            return cli::dispatch(args);
        },
        py::arg("args"), "Run a command-line subcommand in process; returns the exit code.");
}
