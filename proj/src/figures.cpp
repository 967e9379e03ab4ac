#include "optoforce/figures.hpp"

#include <cstdio>

#include "optoforce/emission.hpp"
#include "optoforce/errors.hpp"
#include "optoforce/scattering.hpp"

namespace optoforce {

namespace {

// Shared by every figure: g0 = 0.8, gamma_c = gamma_d = 0.01, eta = 0.02 (omega_M = 1).
RunConfig base_config(double eta = 0.02) {
    RunConfig cfg;
    cfg.system.omega_M = 1.0;
    cfg.system.g0 = 0.8;
    cfg.system.eta = eta;
    cfg.system.gamma_c = 0.01;
    cfg.system.gamma_d = 0.01;
    return cfg;
}

StateSpec state_for(char panel_state) {
    switch (panel_state) {
        case 'g':
            return {StateKind::number, 0.0};
        case 'c':
            return {StateKind::coherent, 1.0};
        default:
            return {StateKind::thermal, 1.0};
    }
}

const char* state_label(char panel_state) {
    switch (panel_state) {
        case 'g':
            return "ground";
        case 'c':
            return "coherent";
        default:
            return "thermal";
    }
}

std::string eta_label(double eta) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "eta%g", eta);
    return buf;
}

}  // namespace

const std::vector<std::string>& figure_ids() {
    static const std::vector<std::string> ids{"2a", "2b", "2c", "3", "4", "5a", "5b", "5c", "5d", "5e", "5f", "6a", "6b"};
    return ids;
}

std::vector<FigureCurve> figure_curves(const std::string& id) {
    std::vector<FigureCurve> curves;
    const WavePacketSpec wide{0.0, 2.0};
    const WavePacketSpec narrow{std::nullopt, 0.01};

    if (id == "2a" || id == "2b" || id == "2c") {
        const char s = "gct"[id[1] - 'a'];
        auto cfg = base_config();
        cfg.state = state_for(s);
        curves.push_back({"fig" + id + "_" + state_label(s), cfg, SpectrumKind::emission});
    } else if (id == "3" || id == "4") {
        const std::vector<double> etas =
            id == "3" ? std::vector<double>{0.0, 0.01, 0.02, 0.04} : std::vector<double>{0.02, 0.02 + 0.625, 0.02 - 0.625};
        for (double eta : etas) {
            curves.push_back({"fig" + id + "_" + eta_label(eta), base_config(eta), SpectrumKind::emission});
        }
    } else if (id.size() == 2 && id[0] == '5' && id[1] >= 'a' && id[1] <= 'f') {
        const int panel = id[1] - 'a';
        const char s = "gct"[panel % 3];
        auto cfg = base_config();
        cfg.state = state_for(s);
        cfg.wavepacket = panel < 3 ? wide : narrow;
        curves.push_back({"fig" + id + "_" + state_label(s), cfg, SpectrumKind::scattering_detected});
    } else if (id == "6a" || id == "6b") {
        for (double eta : {0.0, 0.01, 0.02, 0.04}) {
            auto cfg = base_config(eta);
            cfg.wavepacket = id == "6a" ? wide : narrow;
            curves.push_back({"fig" + id + "_" + eta_label(eta), cfg, SpectrumKind::scattering_detected});
        }
    } else {
        std::string known;
        for (const auto& k : figure_ids()) {
            known += (known.empty() ? "" : ", ") + k;
        }
        throw InputError("unknown figure id '" + id + "' (known: " + known + ")");
    }
    return curves;
}

Spectrum compute_curve(const FigureCurve& curve) {
    const auto& cfg = curve.config;
    const auto p = cfg.effective_system();
    const auto state = cfg.mechanical_state();
    if (curve.kind == SpectrumKind::emission) {
        return emission_spectrum(p, state, cfg.emission_grid());
    }
    const auto spectra = scattering_spectra(p, state, cfg.resolved_wavepacket(), cfg.scattering_grid());
    return curve.kind == SpectrumKind::scattering_detected ? spectra.detected : spectra.undetected;
}

}  // namespace optoforce
