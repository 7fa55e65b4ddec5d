#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qmpe/bath.hpp"
#include "qmpe/dynamics.hpp"
#include "qmpe/liouvillian.hpp"
#include "qmpe/mpemba.hpp"
#include "qmpe/spectral.hpp"

namespace py = pybind11;

namespace {

using Cx = std::complex<double>;

qmpe::ScanVariable variable_from(const std::string& name) {
    if (name == "gamma") return qmpe::ScanVariable::Gamma;
    if (name == "alpha") return qmpe::ScanVariable::Alpha;
    throw std::invalid_argument("variable must be gamma or alpha");
}

qmpe::DistanceKind kind_from(const std::string& name) {
    if (name == "overlap") return qmpe::DistanceKind::CoherentOverlap;
    if (name == "hs") return qmpe::DistanceKind::HilbertSchmidtHalf;
    if (name == "trace") return qmpe::DistanceKind::TraceNorm;
    throw std::invalid_argument("kind must be overlap, hs or trace");
}

std::vector<Cx> roots_of(const qmpe::PseudomodeSpec& spec) {
    return qmpe::polynomial_roots(qmpe::characteristic_polynomial(spec)).roots;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() =
        "Pseudomode relaxation toolkit: spectra, exceptional points, "
        "anomalous-relaxation crossings";
    m.attr("__version__") = "0.1.0";

    py::class_<qmpe::PseudomodeMode>(m, "PseudomodeMode")
        .def(py::init([](double alpha, double omega, double gamma) {
                 return qmpe::PseudomodeMode{alpha, omega, gamma};
             }),
             py::arg("alpha"), py::arg("omega"), py::arg("gamma"))
        .def_readonly("alpha", &qmpe::PseudomodeMode::alpha)
        .def_readonly("omega", &qmpe::PseudomodeMode::omega)
        .def_readonly("gamma", &qmpe::PseudomodeMode::gamma);

    py::class_<qmpe::PseudomodeSpec>(m, "PseudomodeSpec")
        .def(py::init<double, std::vector<qmpe::PseudomodeMode>>(),
             py::arg("omega0"), py::arg("modes"))
        .def_property_readonly("omega0", &qmpe::PseudomodeSpec::omega0)
        .def_property_readonly("mode_count", &qmpe::PseudomodeSpec::mode_count)
        .def_property_readonly(
            "modes",
            [](const qmpe::PseudomodeSpec& s) { return s.modes(); })
        .def("resonant", &qmpe::PseudomodeSpec::resonant);

    py::class_<qmpe::LorentzianBath>(m, "LorentzianBath")
        .def(py::init<double, double, double>(), py::arg("coupling"),
             py::arg("width"), py::arg("omega0"))
        .def_property_readonly("coupling", &qmpe::LorentzianBath::coupling)
        .def_property_readonly("width", &qmpe::LorentzianBath::width)
        .def_property_readonly("omega0", &qmpe::LorentzianBath::omega0);

    m.def("lorentzian_to_pseudomode", &qmpe::lorentzian_to_pseudomode,
          py::arg("bath"));
    m.def(
        "correlation_function",
        [](const qmpe::PseudomodeSpec& spec, double t) {
            return qmpe::correlation_function(spec, t);
        },
        py::arg("spec"), py::arg("t"));

    m.def("roots", &roots_of, py::arg("spec"),
          "characteristic-polynomial roots, slowest decay first");
    m.def(
        "closed_form_roots",
        [](const qmpe::PseudomodeSpec& spec) {
            const auto pair = qmpe::closed_form_roots(spec);
            return std::vector<Cx>{pair[0], pair[1]};
        },
        py::arg("spec"));
    m.def(
        "spectral_gap",
        [](const qmpe::PseudomodeSpec& spec) {
            return qmpe::spectral_gap(
                qmpe::polynomial_roots(qmpe::characteristic_polynomial(spec)));
        },
        py::arg("spec"));
    m.def(
        "is_lep",
        [](const qmpe::PseudomodeSpec& spec) {
            const auto poly = qmpe::characteristic_polynomial(spec);
            return qmpe::detect_lep(poly, qmpe::polynomial_roots(poly)).is_lep;
        },
        py::arg("spec"));
    m.def(
        "locate_lep",
        [](const qmpe::PseudomodeSpec& spec, const std::string& variable,
           std::size_t mode_index, double lo, double hi, double tol) {
            const auto loc = qmpe::locate_lep(spec, variable_from(variable),
                                              mode_index, lo, hi, tol);
            return py::make_tuple(loc.found, loc.value, loc.min_root_gap);
        },
        py::arg("spec"), py::arg("variable"), py::arg("mode_index"),
        py::arg("lo"), py::arg("hi"), py::arg("tol") = 1e-9);
    m.def(
        "liouvillian_eigenvalue",
        [](const qmpe::PseudomodeSpec& spec, const std::vector<int>& index) {
            return qmpe::liouvillian_eigenvalue(
                qmpe::polynomial_roots(qmpe::characteristic_polynomial(spec)),
                index);
        },
        py::arg("spec"), py::arg("index"),
        "generator eigenvalue for the index (m0, n0, m1, n1, ...)");

    m.def("analytic_propagator", &qmpe::analytic_P, py::arg("spec"),
          py::arg("t"));
    m.def(
        "markovian_rate",
        [](const qmpe::PseudomodeSpec& spec) {
            return qmpe::markovian_reduction(spec).gamma_M;
        },
        py::arg("spec"));
    m.def(
        "lamb_shift",
        [](const qmpe::PseudomodeSpec& spec) {
            return qmpe::markovian_reduction(spec).lamb_shift;
        },
        py::arg("spec"));
    m.def(
        "markovian_propagator",
        [](const qmpe::PseudomodeSpec& spec, double t, bool include_lamb_shift) {
            return qmpe::markovian_P(qmpe::markovian_reduction(spec), t,
                                     include_lamb_shift);
        },
        py::arg("spec"), py::arg("t"), py::arg("include_lamb_shift") = false);

    m.def("coherent_cutoff", &qmpe::coherent_cutoff, py::arg("xi_abs"),
          py::arg("tail_tol") = 1e-10,
          "smallest Fock cutoff keeping the coherent tail below tail_tol");
    m.def("coherent_distance", &qmpe::coherent_distance, py::arg("xi_P_abs2"));
    m.def("markovian_distance", &qmpe::markovian_distance, py::arg("xi_abs"),
          py::arg("gamma_M"), py::arg("t"));
    m.def(
        "distance_curve",
        [](const qmpe::PseudomodeSpec& spec, Cx xi,
           const std::vector<double>& times, const std::string& kind) {
            return qmpe::distance_curve(
                qmpe::coherent_trajectory(spec, xi, times), kind_from(kind));
        },
        py::arg("spec"), py::arg("xi"), py::arg("times"),
        py::arg("kind") = "overlap",
        "closed-form distance-to-equilibrium curve of a coherent run");
    m.def(
        "detect_crossing",
        [](const std::vector<double>& times, const std::vector<double>& d1,
           const std::vector<double>& d2) {
            const auto rep = qmpe::detect_crossing(times, d1, d2);
            return py::make_tuple(rep.crossed, rep.t_cross,
                                  rep.ordering_at_zero);
        },
        py::arg("times"), py::arg("d1"), py::arg("d2"));

    m.def(
        "evolve_propagator",
        [](const qmpe::PseudomodeSpec& spec, int n_sys,
           const std::vector<int>& n_modes, Cx xi,
           const std::vector<double>& times) {
            const qmpe::TruncationSpec trunc(n_sys, n_modes);
            const auto lv = qmpe::build_liouvillian(spec, trunc);
            const auto rho0 = qmpe::coherent_initial_state(
                qmpe::CoherentAmplitudeState{xi}, trunc);
            const auto traj = qmpe::evolve_master_equation(lv, rho0, times);
            std::vector<Cx> p;
            double trace_drift = 0.0;
            Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n_sys, n_sys);
            for (int n = 1; n < n_sys; ++n)
                a(n - 1, n) = Cx{std::sqrt(static_cast<double>(n)), 0.0};
            for (const auto& rho_s : traj.states) {
                p.push_back(xi == Cx{0.0, 0.0} ? Cx{0.0, 0.0}
                                               : (rho_s * a).trace() / xi);
                trace_drift = std::max(
                    trace_drift, std::abs(rho_s.trace() - Cx{1.0, 0.0}));
            }
            return py::make_tuple(p, trace_drift, traj.leakage_warning);
        },
        py::arg("spec"), py::arg("n_sys"), py::arg("n_modes"), py::arg("xi"),
        py::arg("times"),
        "integrate the relaxation equation; returns (P list, max trace "
        "drift, leakage flag)");
    m.def(
        "steady_state_diagnostics",
        [](const qmpe::PseudomodeSpec& spec, int n_sys,
           const std::vector<int>& n_modes) {
            const qmpe::TruncationSpec trunc(n_sys, n_modes);
            const auto lv = qmpe::build_liouvillian(spec, trunc);
            const Eigen::MatrixXcd rho = qmpe::steady_state(lv);
            const Eigen::Map<const Eigen::VectorXcd> vec(rho.data(),
                                                         rho.size());
            const double residual = (lv.matrix * vec).norm();
            return py::make_tuple(rho(0, 0).real(), residual);
        },
        py::arg("spec"), py::arg("n_sys"), py::arg("n_modes"),
        "returns (vacuum weight, ||L rho|| residual) of the stationary state");
    m.def(
        "gap_sweep",
        [](const std::vector<double>& gammas, const std::vector<double>& alphas,
           double omega0, int threads) {
            std::vector<py::tuple> rows;
            for (const auto& p : qmpe::gap_sweep(gammas, alphas, omega0, threads))
                rows.push_back(py::make_tuple(p.gamma, p.alpha, p.delta, p.is_lep));
            return rows;
        },
        py::arg("gammas"), py::arg("alphas"), py::arg("omega0"),
        py::arg("threads") = 1);
}
