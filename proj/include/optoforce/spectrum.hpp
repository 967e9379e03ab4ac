#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "optoforce/core_model.hpp"

namespace optoforce {

/// Uniform detuning axis delta_min, delta_min + step, ..., up to delta_max.
struct SpectralGrid {
    double delta_min = -4.0;
    double delta_max = 2.0;
    double step = 0.001;

    std::size_t size() const;
    double at(std::size_t i) const { return delta_min + static_cast<double>(i) * step; }
    /// Largest grid value actually sampled.
    double last() const { return at(size() - 1); }

    bool operator==(const SpectralGrid&) const = default;
};

/// Throws InputError unless delta_min < delta_max and step > 0. Warns (and
/// returns the messages) when step > gamma/10.
std::vector<std::string> validate(const SpectralGrid& grid, double gamma);

/// Default emission axis [-4, 2] omega_M with step gamma/20.
SpectralGrid default_emission_grid(const SystemParams& p);

enum class SpectrumKind { emission, scattering_detected, scattering_undetected };

const char* to_string(SpectrumKind kind);
SpectrumKind spectrum_kind_from_string(const std::string& name);

/// Lorentzian single-photon input: center delta0, half-width epsilon.
struct WavePacket {
    double delta0 = 0.0;
    double epsilon = 1.0;

    bool operator==(const WavePacket&) const = default;
};

struct SpectrumMeta {
    SpectrumKind kind = SpectrumKind::emission;
    std::optional<SystemParams> params;
    std::string state;
    std::optional<WavePacket> wavepacket;
    int phonon_levels = 0;
    std::vector<std::string> warnings;
};

/// Dimensionless spectral density S(delta) * omega_M sampled on a grid.
struct Spectrum {
    SpectralGrid grid;
    std::vector<double> values;
    SpectrumMeta meta;
};

/// Trapezoidal integral of the sampled density over the grid.
double integrate_spectrum(const Spectrum& sp);

/// Linear interpolation inside the grid; throws InputError outside.
double sample(const Spectrum& sp, double delta);

/// Relative L2 distance |a - b| / |b| over a shared grid.
double relative_l2(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace optoforce
