#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "optoforce/core_model.hpp"
#include "optoforce/emission.hpp"
#include "optoforce/errors.hpp"
#include "optoforce/franck_condon.hpp"
#include "optoforce/inference.hpp"
#include "optoforce/oracle_dynamics.hpp"
#include "optoforce/scattering.hpp"

namespace py = pybind11;
using namespace optoforce;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

py::array_t<double> grid_axis(const SpectralGrid& g) {
    std::vector<double> x(g.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = g.at(i);
    }
    return to_array(x);
}

Spectrum spectrum_from_arrays(const SpectralGrid& grid, const std::vector<double>& values) {
    if (values.size() != grid.size()) {
        throw InputError("values length does not match the grid");
    }
    Spectrum sp;
    sp.grid = grid;
    sp.values = values;
    return sp;
}

}  // namespace

PYBIND11_MODULE(_optoforce, m) {
    m.doc() = "Single-photon spectra of a force-loaded optomechanical cavity";

    auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InputError>(m, "InputError", error.ptr());
    py::register_exception<TruncationError>(m, "TruncationError", error.ptr());
    py::register_exception<InferenceError>(m, "InferenceError", error.ptr());
    py::register_exception<OracleRefusal>(m, "OracleRefusal", error.ptr());
    py::register_exception<NormDriftError>(m, "NormDriftError", error.ptr());

    // Library warnings become Python RuntimeWarnings.
    set_warning_handler([](std::string_view msg) {
        py::gil_scoped_acquire gil;
        py::module_::import("warnings").attr("warn")(std::string(msg), py::module_::import("builtins").attr("RuntimeWarning"));
    });

    py::class_<SystemParams>(m, "SystemParams")
        .def(py::init([](double omega_M, double g0, double eta, double gamma_c, double gamma_d,
                         std::optional<double> omega_c) {
                 SystemParams p;
                 p.omega_M = omega_M;
                 p.g0 = g0;
                 p.eta = eta;
                 p.gamma_c = gamma_c;
                 p.gamma_d = gamma_d;
                 p.omega_c = omega_c;
                 return p;
             }),
             py::kw_only(), py::arg("omega_M") = 1.0, py::arg("g0") = 0.0, py::arg("eta") = 0.0,
             py::arg("gamma_c") = 0.01, py::arg("gamma_d") = 0.0, py::arg("omega_c") = py::none())
        .def_readwrite("omega_M", &SystemParams::omega_M)
        .def_readwrite("g0", &SystemParams::g0)
        .def_readwrite("eta", &SystemParams::eta)
        .def_readwrite("gamma_c", &SystemParams::gamma_c)
        .def_readwrite("gamma_d", &SystemParams::gamma_d)
        .def_readwrite("omega_c", &SystemParams::omega_c)
        .def("__eq__", [](const SystemParams& a, const SystemParams& b) { return a == b; })
        .def("__repr__", [](const SystemParams& p) {
            return "SystemParams(omega_M=" + std::to_string(p.omega_M) + ", g0=" + std::to_string(p.g0) +
                   ", eta=" + std::to_string(p.eta) + ", gamma_c=" + std::to_string(p.gamma_c) +
                   ", gamma_d=" + std::to_string(p.gamma_d) + ")";
        });

    py::class_<DerivedParams>(m, "DerivedParams")
        .def_readonly("beta0", &DerivedParams::beta0)
        .def_readonly("beta1", &DerivedParams::beta1)
        .def_readonly("beta", &DerivedParams::beta)
        .def_readonly("lambda_", &DerivedParams::lambda)
        .def_readonly("zeta", &DerivedParams::zeta)
        .def_readonly("gamma", &DerivedParams::gamma);

    py::class_<PhysicalParams>(m, "PhysicalParams")
        .def(py::init([](double omega_M_si, double x0, double hbar) { return PhysicalParams{omega_M_si, x0, hbar}; }),
             py::arg("omega_M_si"), py::arg("x0"), py::arg("hbar") = kHbar)
        .def_readwrite("omega_M_si", &PhysicalParams::omega_M_si)
        .def_readwrite("x0", &PhysicalParams::x0)
        .def_readwrite("hbar", &PhysicalParams::hbar);

    py::class_<MechanicalState>(m, "MechanicalState")
        .def_static("number", &MechanicalState::number, py::arg("m0"))
        .def_static("coherent", &MechanicalState::coherent, py::arg("alpha"))
        .def_static("thermal", &MechanicalState::thermal, py::arg("nbar"))
        .def_property_readonly("kind", [](const MechanicalState& s) { return std::string(to_string(s.kind())); })
        .def_property_readonly("value", &MechanicalState::value)
        .def_property_readonly("truncation", &MechanicalState::truncation)
        .def("__repr__", &MechanicalState::describe);

    py::class_<SpectralGrid>(m, "SpectralGrid")
        .def(py::init([](double lo, double hi, double step) { return SpectralGrid{lo, hi, step}; }),
             py::arg("delta_min"), py::arg("delta_max"), py::arg("step"))
        .def_readwrite("delta_min", &SpectralGrid::delta_min)
        .def_readwrite("delta_max", &SpectralGrid::delta_max)
        .def_readwrite("step", &SpectralGrid::step)
        .def("__len__", &SpectralGrid::size)
        .def_property_readonly("detunings", &grid_axis);

    py::class_<WavePacket>(m, "WavePacket")
        .def(py::init([](double delta0, double epsilon) { return WavePacket{delta0, epsilon}; }), py::arg("delta0"),
             py::arg("epsilon"))
        .def_readwrite("delta0", &WavePacket::delta0)
        .def_readwrite("epsilon", &WavePacket::epsilon);

    py::class_<Spectrum>(m, "Spectrum")
        .def(py::init(&spectrum_from_arrays), py::arg("grid"), py::arg("values"))
        .def_readonly("grid", &Spectrum::grid)
        .def_property_readonly("detunings", [](const Spectrum& s) { return grid_axis(s.grid); })
        .def_property_readonly("values", [](const Spectrum& s) { return to_array(s.values); })
        .def_property_readonly("kind", [](const Spectrum& s) { return std::string(to_string(s.meta.kind)); })
        .def_property_readonly("warnings", [](const Spectrum& s) { return s.meta.warnings; })
        .def("integral", &integrate_spectrum)
        .def("sample", &sample, py::arg("delta"));

    py::class_<Peak>(m, "Peak")
        .def_readonly("position", &Peak::position)
        .def_readonly("height", &Peak::height)
        .def_readonly("prominence", &Peak::prominence);
    py::class_<PeakSet>(m, "PeakSet")
        .def(py::init<>())
        .def_readonly("peaks", &PeakSet::peaks)
        .def_readonly("dips", &PeakSet::dips);

    py::class_<Interval>(m, "Interval")
        .def(py::init([](double lo, double hi) { return Interval{lo, hi}; }), py::arg("lo"), py::arg("hi"))
        .def_readwrite("lo", &Interval::lo)
        .def_readwrite("hi", &Interval::hi);

    py::class_<Candidate>(m, "Candidate")
        .def_readonly("l", &Candidate::l)
        .def_readonly("eta", &Candidate::eta)
        .def_readonly("residual", &Candidate::residual);

    py::class_<ForceEstimate>(m, "ForceEstimate")
        .def_readonly("eta_hat", &ForceEstimate::eta_hat)
        .def_readonly("f_hat", &ForceEstimate::f_hat)
        .def_readonly("candidates", &ForceEstimate::candidates)
        .def_readonly("resolvable", &ForceEstimate::resolvable)
        .def_readonly("ambiguous", &ForceEstimate::ambiguous)
        .def_readonly("zpl_position", &ForceEstimate::zpl_position)
        .def_readonly("curvature", &ForceEstimate::curvature)
        .def_property_readonly("method", [](const ForceEstimate& e) { return std::string(to_string(e.method)); });

    py::class_<ForwardModel>(m, "ForwardModel")
        .def(py::init([](const SystemParams& p, const MechanicalState& state, const std::string& kind,
                         std::optional<WavePacket> wp, bool resonant) {
                 ForwardModel fm;
                 fm.params = p;
                 fm.state = state;
                 fm.kind = spectrum_kind_from_string(kind);
                 fm.wavepacket = wp;
                 fm.resonant = resonant;
                 return fm;
             }),
             py::arg("params"), py::arg("state") = MechanicalState::number(0), py::arg("kind") = "emission",
             py::arg("wavepacket") = py::none(), py::arg("resonant") = false)
        .def("spectrum", [](const ForwardModel& fm, double eta, const SpectralGrid& g) {
            return to_array(fm.spectrum(eta, g));
        }, py::arg("eta"), py::arg("grid"));

    py::class_<OracleReport>(m, "OracleReport")
        .def_readonly("oracle", &OracleReport::oracle)
        .def_readonly("analytic", &OracleReport::analytic)
        .def_readonly("relative_l2", &OracleReport::relative_l2)
        .def_readonly("norm_drift", &OracleReport::norm_drift)
        .def_readonly("final_cavity_population", &OracleReport::final_cavity_population)
        .def_readonly("levels", &OracleReport::levels)
        .def_readonly("t_end", &OracleReport::t_end)
        .def_readonly("dt", &OracleReport::dt)
        .def_readonly("steps", &OracleReport::steps)
        .def_property_readonly("n_modes", [](const OracleReport& r) { return r.bath.n_modes; })
        .def_readonly("warnings", &OracleReport::warnings);

    py::class_<OracleSettings>(m, "OracleSettings")
        .def(py::init([](std::optional<double> window, std::optional<int> n_modes, std::optional<double> t_end,
                         std::optional<double> dt, std::optional<bool> band_correction) {
                 return OracleSettings{window, n_modes, t_end, dt, band_correction};
             }),
             py::kw_only(), py::arg("window") = py::none(), py::arg("n_modes") = py::none(),
             py::arg("t_end") = py::none(), py::arg("dt") = py::none(), py::arg("band_correction") = py::none());

    m.def("derived_params", &derived_params, py::arg("params"));
    m.def("eigen_energy", &eigen_energy, py::arg("params"), py::arg("m"), py::arg("j"));
    m.def("resonance_detuning", &resonance_detuning, py::arg("params"), py::arg("n"), py::arg("m"));
    m.def("resolvability", &resolvability, py::arg("params"));
    m.def("min_measurable_force", &min_measurable_force, py::arg("phys"), py::arg("params"));
    m.def("force_from_eta", &force_from_eta, py::arg("phys"), py::arg("params"), py::arg("eta"));
    m.def("eta_from_force", &eta_from_force, py::arg("phys"), py::arg("params"), py::arg("force"));
    m.def("periodic_map", &periodic_map, py::arg("params"), py::arg("omega_f"));
    m.def("branch_spacing", &branch_spacing, py::arg("params"));

    m.def("displaced_overlap", &displaced_overlap, py::arg("m"), py::arg("n"), py::arg("d"));
    m.def("fc_matrix", [](double d, int size) {
        const auto t = fc_table(d, size);
        py::array_t<double> out({size, size});
        auto r = out.mutable_unchecked<2>();
        for (int i = 0; i < size; ++i) {
            for (int j = 0; j < size; ++j) {
                r(i, j) = t(i, j);
            }
        }
        return out;
    }, py::arg("d"), py::arg("size"), "Matrix of <m|D(d)|n> for m, n < size.");

    m.def("default_emission_grid", &default_emission_grid, py::arg("params"));
    m.def("default_scattering_grid", &default_scattering_grid, py::arg("params"), py::arg("wavepacket"));
    m.def("resonant_wavepacket", &resonant_wavepacket, py::arg("params"), py::arg("epsilon"));

    m.def("emission_spectrum", [](const SystemParams& p, const MechanicalState& s, std::optional<SpectralGrid> g) {
        return emission_spectrum(p, s, g.value_or(default_emission_grid(p)));
    }, py::arg("params"), py::arg("state") = MechanicalState::number(0), py::arg("grid") = py::none());
    m.def("emission_total_probability", [](const SystemParams& p, const MechanicalState& s) {
        return EmissionModel(p, s).total_probability();
    }, py::arg("params"), py::arg("state") = MechanicalState::number(0));

    m.def("scattering_spectra", [](const SystemParams& p, const MechanicalState& s, const WavePacket& wp,
                                   std::optional<SpectralGrid> g) {
        auto r = scattering_spectra(p, s, wp, g.value_or(default_scattering_grid(p, wp)));
        return py::make_tuple(r.detected, r.undetected);
    }, py::arg("params"), py::arg("state"), py::arg("wavepacket"), py::arg("grid") = py::none(),
       "(detected, undetected) spectra.");
    m.def("scattering_channel_probabilities", [](const SystemParams& p, const MechanicalState& s,
                                                 const WavePacket& wp) {
        return ScatteringModel(p, s, wp).channel_probabilities();
    }, py::arg("params"), py::arg("state"), py::arg("wavepacket"));

    m.def("find_peaks", &find_peaks, py::arg("spectrum"), py::arg("rel_prominence") = kDefaultRelProminence);
    m.def("estimate_force_zpl", &estimate_force_zpl, py::arg("peaks"), py::arg("params"), py::arg("prior"),
          py::arg("phys") = py::none());
    m.def("disambiguate", &disambiguate, py::arg("measured"), py::arg("estimate"), py::arg("model"),
          py::arg("phys") = py::none());
    m.def("estimate_force_height", &estimate_force_height, py::arg("measured"), py::arg("reference_point"),
          py::arg("model"), py::arg("prior"), py::arg("phys") = py::none());

    m.def("run_emission_oracle", &run_emission_oracle, py::arg("params"), py::arg("state"),
          py::arg("settings") = OracleSettings{}, py::call_guard<py::gil_scoped_release>());
    m.def("run_scattering_oracle", &run_scattering_oracle, py::arg("params"), py::arg("state"),
          py::arg("wavepacket"), py::arg("settings") = OracleSettings{}, py::call_guard<py::gil_scoped_release>());
}
