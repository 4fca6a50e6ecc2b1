// pybind11 bindings for the main operations.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "omqd/covariance.hpp"
#include "omqd/entanglement.hpp"
#include "omqd/meanfield.hpp"
#include "omqd/params.hpp"
#include "omqd/perturbative.hpp"
#include "omqd/scenario.hpp"

namespace py = pybind11;
using namespace omqd;

namespace {

py::array_t<double> times_array(const MeanFieldTrajectory& traj) {
    py::array_t<double> out(static_cast<py::ssize_t>(traj.times.size()));
    std::copy(traj.times.begin(), traj.times.end(), out.mutable_data());
    return out;
}

template <typename Getter>
py::array_t<std::complex<double>> complex_array(const MeanFieldTrajectory& traj, Getter get) {
    py::array_t<std::complex<double>> out(static_cast<py::ssize_t>(traj.states.size()));
    auto* ptr = out.mutable_data();
    for (std::size_t i = 0; i < traj.states.size(); ++i) ptr[i] = get(traj.states[i]);
    return out;
}

template <typename Getter>
py::array_t<double> real_array(const MeanFieldTrajectory& traj, Getter get) {
    py::array_t<double> out(static_cast<py::ssize_t>(traj.states.size()));
    auto* ptr = out.mutable_data();
    for (std::size_t i = 0; i < traj.states.size(); ++i) ptr[i] = get(traj.states[i]);
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Periodically modulated cavity/mirror/exciton simulator";

    py::register_exception<ValidationError>(m, "ValidationError");
    py::register_exception<InstabilityError>(m, "InstabilityError");
    py::register_exception<UnphysicalBlockError>(m, "UnphysicalBlockError");
    py::register_exception<ConfigError>(m, "ConfigError");

    py::class_<SystemParams>(m, "SystemParams")
        .def(py::init([](double omega_m, double delta_c, double delta_0, double omega_e,
                         double Omega, double E0, double eps, double G, double g0, double kappa_a,
                         double kappa_d, double gamma_m, double N, double n_b) {
                 return SystemParams{omega_m, delta_c, delta_0, omega_e, Omega, E0,  eps,
                                     G,       g0,      kappa_a, kappa_d, gamma_m, N, n_b};
             }),
             py::kw_only(), py::arg("omega_m") = 1.0, py::arg("delta_c") = 0.0,
             py::arg("delta_0") = 0.0, py::arg("omega_e") = 0.0, py::arg("Omega") = 0.0,
             py::arg("E0") = 0.0, py::arg("eps") = 0.0, py::arg("G") = 0.0, py::arg("g0") = 0.0,
             py::arg("kappa_a") = 0.0, py::arg("kappa_d") = 0.0, py::arg("gamma_m") = 0.0,
             py::arg("N") = 1.0, py::arg("n_b") = 0.0)
        .def_readwrite("omega_m", &SystemParams::omega_m)
        .def_readwrite("delta_c", &SystemParams::delta_c)
        .def_readwrite("delta_0", &SystemParams::delta_0)
        .def_readwrite("omega_e", &SystemParams::omega_e)
        .def_readwrite("Omega", &SystemParams::Omega)
        .def_readwrite("E0", &SystemParams::E0)
        .def_readwrite("eps", &SystemParams::eps)
        .def_readwrite("G", &SystemParams::G)
        .def_readwrite("g0", &SystemParams::g0)
        .def_readwrite("kappa_a", &SystemParams::kappa_a)
        .def_readwrite("kappa_d", &SystemParams::kappa_d)
        .def_readwrite("gamma_m", &SystemParams::gamma_m)
        .def_readwrite("N", &SystemParams::N)
        .def_readwrite("n_b", &SystemParams::n_b)
        .def("modulation_period", &SystemParams::modulation_period);

    py::class_<MeanFieldState>(m, "MeanFieldState")
        .def(py::init([](double q, double p, std::complex<double> a, std::complex<double> sigma) {
                 return MeanFieldState{q, p, a, sigma};
             }),
             py::arg("q") = 0.0, py::arg("p") = 0.0, py::arg("a") = std::complex<double>{},
             py::arg("sigma") = std::complex<double>{})
        .def_readwrite("q", &MeanFieldState::q)
        .def_readwrite("p", &MeanFieldState::p)
        .def_readwrite("a", &MeanFieldState::a)
        .def_readwrite("sigma", &MeanFieldState::sigma);

    py::class_<MeanFieldTrajectory>(m, "MeanFieldTrajectory")
        .def_property_readonly("dt", [](const MeanFieldTrajectory& t) { return t.dt; })
        .def_property_readonly("times", &times_array)
        .def_property_readonly("q", [](const MeanFieldTrajectory& t) {
            return real_array(t, [](const MeanFieldState& s) { return s.q; });
        })
        .def_property_readonly("p", [](const MeanFieldTrajectory& t) {
            return real_array(t, [](const MeanFieldState& s) { return s.p; });
        })
        .def_property_readonly("a", [](const MeanFieldTrajectory& t) {
            return complex_array(t, [](const MeanFieldState& s) { return s.a; });
        })
        .def_property_readonly("sigma", [](const MeanFieldTrajectory& t) {
            return complex_array(t, [](const MeanFieldState& s) { return s.sigma; });
        })
        .def("__len__", [](const MeanFieldTrajectory& t) { return t.states.size(); });

    m.def("validate", &validate, py::arg("params"));
    m.def("validation_errors", &validation_errors, py::arg("params"));
    m.def("drive_amplitude", &drive_amplitude, py::arg("t"), py::arg("params"));
    m.def("qd_detuning", &qd_detuning, py::arg("t"), py::arg("params"));

    m.def("meanfield_rhs", &meanfield_rhs, py::arg("state"), py::arg("t"), py::arg("params"));
    m.def("integrate_meanfield", &integrate_meanfield, py::arg("params"), py::arg("initial"),
          py::arg("t_end"), py::arg("dt"), py::arg("bound") = 1e6, py::arg("start_step") = 0,
          py::call_guard<py::gil_scoped_release>());
    m.def(
        "detect_limit_cycle",
        [](const MeanFieldTrajectory& traj, double tau, double tol) -> py::object {
            const auto t = detect_limit_cycle(traj, tau, tol);
            return t ? py::cast(*t) : py::none();
        },
        py::arg("traj"), py::arg("tau"), py::arg("tol"));
    m.def("steady_displacement_qs", &steady_displacement_qs, py::arg("params"),
          py::arg("sigma_ss_mag2"));

    py::enum_<RecursionVariant>(m, "RecursionVariant")
        .value("harmonic", RecursionVariant::harmonic)
        .value("consistent", RecursionVariant::consistent)
        .value("literal", RecursionVariant::literal);

    py::enum_<Var>(m, "Var")
        .value("q", Var::q)
        .value("p", Var::p)
        .value("a", Var::a)
        .value("sigma", Var::sigma);

    py::class_<FourierExpansion>(m, "FourierExpansion")
        .def_property_readonly("n_max", &FourierExpansion::n_max)
        .def_property_readonly("j_max", &FourierExpansion::j_max)
        .def_property_readonly("Omega", &FourierExpansion::Omega)
        .def("coeff", &FourierExpansion::coeff, py::arg("var"), py::arg("n"), py::arg("j"));

    m.def("fourier_drive_coeffs", &fourier_drive_coeffs, py::arg("params"));
    m.def("fourier_detuning_coeffs", &fourier_detuning_coeffs, py::arg("params"));
    m.def("build_expansion", &build_expansion, py::arg("params"), py::arg("n_max") = 3,
          py::arg("j_max") = 4, py::arg("variant") = RecursionVariant::harmonic);
    m.def("reconstruct", &reconstruct, py::arg("expansion"), py::arg("G"), py::arg("t"));

    py::class_<CovarianceState>(m, "CovarianceState")
        .def(py::init([](const Matrix6d& V, double t) { return CovarianceState{V, t}; }),
             py::arg("V"), py::arg("t") = 0.0)
        .def_readwrite("V", &CovarianceState::V)
        .def_readwrite("t", &CovarianceState::t);

    m.def("drift_matrix",
          [](const MeanFieldState& mean, double t, const SystemParams& p) {
              return drift_matrix(mean, t, p).D;
          },
          py::arg("mean"), py::arg("t"), py::arg("params"));
    m.def("diffusion_matrix", &diffusion_matrix, py::arg("params"));
    m.def("initial_covariance", &initial_covariance, py::arg("params"));
    m.def(
        "integrate_covariance",
        [](const SystemParams& params, const Matrix6d& V0, const MeanFieldTrajectory& traj,
           double t_end, int stride) {
            std::vector<CovarianceState> cov;
            {
                py::gil_scoped_release release;
                cov = integrate_covariance(params, CovarianceState{V0, 0.0}, traj, t_end);
            }
            const auto n = (cov.size() + static_cast<std::size_t>(stride) - 1) /
                           static_cast<std::size_t>(stride);
            py::array_t<double> times(static_cast<py::ssize_t>(n));
            py::array_t<double> vs({static_cast<py::ssize_t>(n), py::ssize_t{6}, py::ssize_t{6}});
            auto* tp = times.mutable_data();
            auto* vp = vs.mutable_data();
            std::size_t k = 0;
            for (std::size_t i = 0; i < cov.size(); i += static_cast<std::size_t>(stride), ++k) {
                tp[k] = cov[i].t;
                for (int r = 0; r < 6; ++r)
                    for (int c = 0; c < 6; ++c) vp[k * 36 + static_cast<std::size_t>(r * 6 + c)] =
                        cov[i].V(r, c);
            }
            return py::make_tuple(times, vs);
        },
        py::arg("params"), py::arg("V0"), py::arg("traj"), py::arg("t_end"),
        py::arg("stride") = 1);

    py::class_<FluctuationEnergies>(m, "FluctuationEnergies")
        .def_readonly("mirror", &FluctuationEnergies::mirror)
        .def_readonly("cavity", &FluctuationEnergies::cavity)
        .def_readonly("exciton", &FluctuationEnergies::exciton);

    m.def("fluctuation_energies", &fluctuation_energies, py::arg("state"),
          py::arg("subtract_vacuum") = false);
    m.def("phonon_number", &phonon_number, py::arg("state"));

    py::enum_<Mode>(m, "Mode")
        .value("mirror", Mode::mirror)
        .value("cavity", Mode::cavity)
        .value("qd", Mode::qd);

    py::class_<TwoModeCovariance>(m, "TwoModeCovariance")
        .def(py::init([](const Matrix2d& X, const Matrix2d& Y, const Matrix2d& Z) {
                 return TwoModeCovariance{X, Y, Z};
             }),
             py::arg("X"), py::arg("Y"), py::arg("Z"))
        .def_readwrite("X", &TwoModeCovariance::X)
        .def_readwrite("Y", &TwoModeCovariance::Y)
        .def_readwrite("Z", &TwoModeCovariance::Z)
        .def("assembled", &TwoModeCovariance::assembled);

    m.def("extract_two_mode", &extract_two_mode, py::arg("state"), py::arg("mode_a"),
          py::arg("mode_b"));
    m.def("nu_minus", &nu_minus, py::arg("tm"));
    m.def("log_negativity", &log_negativity, py::arg("tm"));
    m.def("symplectic_oracle", &symplectic_oracle, py::arg("tm"));

    m.def("run_scenario_file",
          [](const std::filesystem::path& config) {
              const auto loaded = load_config(config);
              if (std::holds_alternative<ScenarioSpec>(loaded))
                  return run_scenario(std::get<ScenarioSpec>(loaded));
              return std::vector<std::filesystem::path>{
                  run_sweep(std::get<SweepSpec>(loaded), 1)};
          },
          py::arg("config"), py::call_guard<py::gil_scoped_release>());

#ifdef OMQD_VERSION
    m.attr("__version__") = OMQD_VERSION;
#else
    m.attr("__version__") = "dev";
#endif
}
