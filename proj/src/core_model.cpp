#include "optoforce/core_model.hpp"

#include <cmath>
#include <sstream>

#include "optoforce/errors.hpp"

namespace optoforce {

void validate(const SystemParams& p) {
    if (!(p.omega_M > 0.0) || !std::isfinite(p.omega_M)) {
        throw InputError("omega_M must be positive and finite");
    }
    if (!(p.gamma_c > 0.0) || !std::isfinite(p.gamma_c)) {
        throw InputError("gamma_c must be positive and finite");
    }
    if (!(p.gamma_d >= 0.0) || !std::isfinite(p.gamma_d)) {
        throw InputError("gamma_d must be non-negative and finite");
    }
    if (!(p.g0 >= 0.0) || !std::isfinite(p.g0)) {
        throw InputError("g0 must be non-negative and finite");
    }
    if (!std::isfinite(p.eta)) {
        throw InputError("eta must be finite");
    }
    if ((p.gamma_c + p.gamma_d) / p.omega_M >= 1.0) {
        std::ostringstream msg;
        msg << "outside the resolved-sideband regime: (gamma_c+gamma_d)/omega_M = "
            << (p.gamma_c + p.gamma_d) / p.omega_M;
        warn(msg.str());
    }
}

void validate(const PhysicalParams& phys) {
    if (!(phys.omega_M_si > 0.0) || !(phys.x0 > 0.0) || !(phys.hbar > 0.0)) {
        throw InputError("physical parameters omega_M_si, x0 and hbar must be strictly positive");
    }
}

DerivedParams derived_params(const SystemParams& p) {
    const double wm = p.omega_M;
    return DerivedParams{
        .beta0 = p.eta / wm,
        .beta1 = (p.g0 + p.eta) / wm,
        .beta = p.g0 / wm,
        .lambda = (p.g0 * p.g0 + 2.0 * p.g0 * p.eta) / wm,
        .zeta = p.eta * p.eta / wm,
        .gamma = p.gamma_c + p.gamma_d,
    };
}

double eigen_energy(const SystemParams& p, int m, int j) {
    const double shift = p.g0 * m + p.eta;
    return m * p.omega_c.value_or(0.0) + j * p.omega_M - shift * shift / p.omega_M;
}

double resonance_detuning(const SystemParams& p, int n, int m) {
    return (n - m) * p.omega_M - (p.g0 * p.g0 + 2.0 * p.g0 * p.eta) / p.omega_M;
}

bool resolvability(const SystemParams& p) {
    return 2.0 * p.g0 * std::abs(p.eta) / p.omega_M > p.gamma_c + p.gamma_d;
}

double min_measurable_force(const PhysicalParams& phys, const SystemParams& p) {
    // gamma and g0 enter as ratios to omega_M, which carries the SI scale.
    const double gamma_ratio = (p.gamma_c + p.gamma_d) / p.omega_M;
    const double g0_ratio = p.g0 / p.omega_M;
    return phys.hbar * gamma_ratio * phys.omega_M_si / (2.0 * g0_ratio * phys.x0);
}

double force_from_eta(const PhysicalParams& phys, const SystemParams& p, double eta) {
    return phys.hbar * (eta / p.omega_M) * phys.omega_M_si / phys.x0;
}

double eta_from_force(const PhysicalParams& phys, const SystemParams& p, double force) {
    return force * phys.x0 / (phys.hbar * phys.omega_M_si) * p.omega_M;
}

SystemParams periodic_map(const SystemParams& p, double omega_f) {
    if (!(omega_f > 0.0) || !std::isfinite(omega_f)) {
        throw InputError("modulation frequency omega_f must be positive");
    }
    if (omega_f >= p.omega_M) {
        throw InputError("periodic mapping requires omega_f < omega_M");
    }
    // One-photon sector sets the scale of the counter-rotating terms.
    const double rwa_scale = (p.g0 + std::abs(p.eta)) / 2.0;
    if (p.omega_M + omega_f < 10.0 * rwa_scale) {
        std::ostringstream msg;
        msg << "rotating-wave condition weak: omega_M + omega_f = " << p.omega_M + omega_f
            << " is less than 10x (g0+|eta|)/2 = " << 10.0 * rwa_scale;
        warn(msg.str());
    }
    SystemParams mapped = p;
    mapped.omega_M = p.omega_M - omega_f;
    mapped.g0 = p.g0 / 2.0;
    mapped.eta = p.eta / 2.0;
    return mapped;
}

}  // namespace optoforce
