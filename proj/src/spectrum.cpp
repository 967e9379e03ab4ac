#include "optoforce/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "optoforce/errors.hpp"

namespace optoforce {

std::size_t SpectralGrid::size() const {
    if (!(step > 0.0) || !(delta_max > delta_min)) {
        return 0;
    }
    // Tolerate rounding in (max - min)/step so that exact multiples keep their endpoint.
    const double count = (delta_max - delta_min) / step;
    return static_cast<std::size_t>(std::floor(count + 1e-9)) + 1;
}

std::vector<std::string> validate(const SpectralGrid& grid, double gamma) {
    if (!std::isfinite(grid.delta_min) || !std::isfinite(grid.delta_max) || !(grid.delta_min < grid.delta_max)) {
        throw InputError("spectral grid requires delta_min < delta_max");
    }
    if (!(grid.step > 0.0) || !std::isfinite(grid.step)) {
        throw InputError("spectral grid step must be positive");
    }
    if (grid.size() > 50'000'000) {
        throw InputError("spectral grid has too many points");
    }
    if (grid.step > gamma / 10.0) {
        std::ostringstream msg;
        msg << "grid step " << grid.step << " is coarser than gamma/10 = " << gamma / 10.0;
        warn(msg.str());
        return {msg.str()};
    }
    return {};
}

SpectralGrid default_emission_grid(const SystemParams& p) {
    const double gamma = p.gamma_c + p.gamma_d;
    return SpectralGrid{-4.0 * p.omega_M, 2.0 * p.omega_M, gamma / 20.0};
}

const char* to_string(SpectrumKind kind) {
    switch (kind) {
        case SpectrumKind::emission: return "emission";
        case SpectrumKind::scattering_detected: return "scattering-detected";
        case SpectrumKind::scattering_undetected: return "scattering-undetected";
    }
    return "unknown";
}

SpectrumKind spectrum_kind_from_string(const std::string& name) {
    if (name == "emission") return SpectrumKind::emission;
    if (name == "scattering-detected") return SpectrumKind::scattering_detected;
    if (name == "scattering-undetected") return SpectrumKind::scattering_undetected;
    throw InputError("unknown spectrum kind '" + name + "'");
}

double integrate_spectrum(const Spectrum& sp) {
    const std::size_t n = sp.values.size();
    if (n < 2) {
        return 0.0;
    }
    double sum = 0.5 * (sp.values.front() + sp.values.back());
    for (std::size_t i = 1; i + 1 < n; ++i) {
        sum += sp.values[i];
    }
    return sum * sp.grid.step;
}

double sample(const Spectrum& sp, double delta) {
    const std::size_t n = sp.values.size();
    if (n == 0) {
        throw InputError("cannot sample an empty spectrum");
    }
    const double pos = (delta - sp.grid.delta_min) / sp.grid.step;
    if (pos < -1e-9 || pos > static_cast<double>(n - 1) + 1e-9) {
        throw InputError("sample point lies outside the spectral grid");
    }
    if (n == 1) {
        return sp.values[0];
    }
    const double clamped = std::min(std::max(pos, 0.0), static_cast<double>(n - 1));
    const auto i = std::min(static_cast<std::size_t>(clamped), n - 2);
    const double frac = clamped - static_cast<double>(i);
    return sp.values[i] * (1.0 - frac) + sp.values[i + 1] * frac;
}

double relative_l2(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) {
        throw InputError("relative_l2 requires equal-length samples");
    }
    double diff = 0.0;
    double ref = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff += (a[i] - b[i]) * (a[i] - b[i]);
        ref += b[i] * b[i];
    }
    if (ref == 0.0) {
        return diff == 0.0 ? 0.0 : INFINITY;
    }
    return std::sqrt(diff / ref);
}

}  // namespace optoforce
