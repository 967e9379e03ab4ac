#pragma once

#include <algorithm>
#include <complex>
#include <utility>
#include <vector>

#include "optoforce/core_model.hpp"
#include "optoforce/franck_condon.hpp"
#include "optoforce/mech_states.hpp"
#include "optoforce/spectrum.hpp"

namespace optoforce {

void validate(const WavePacket& wp);

/// Wavepacket centered on the zero-phonon transition, delta0 = -lambda.
WavePacket resonant_wavepacket(const SystemParams& p, double epsilon);

/// Axis covering [delta0 - 4 eps, delta0 + 4 eps] and [-3, 1] omega_M with
/// step min(gamma, 2 eps)/20.
SpectralGrid default_scattering_grid(const SystemParams& p, const WavePacket& wp);

/// Detected-channel amplitude for a mirror starting in the displaced level l~(0)
/// and ending in m~(0), time phase dropped:
///   sqrt(eps/pi) [ delta_{ml}/(dk - d0 + i eps)
///     - sum_n <m|D(beta)|n><n|D(-beta)|l> i gamma_c / ((dk + lambda - (n-m) wM + i gamma/2)(dk - d0 - (l-m) wM + i eps)) ].
std::complex<double> scattering_amplitude_B(const SystemParams& p, const DerivedParams& dp,
                                            const FranckCondonTable& fc_beta, const FranckCondonTable& fc_minus_beta,
                                            int l, int m, double delta_k, const WavePacket& wp);

/// Undetected-channel counterpart: the scattered term only, with prefactor
/// i sqrt(gamma_c gamma_d) in place of i gamma_c.
std::complex<double> scattering_amplitude_C(const SystemParams& p, const DerivedParams& dp,
                                            const FranckCondonTable& fc_beta, const FranckCondonTable& fc_minus_beta,
                                            int l, int m, double delta_q, const WavePacket& wp);

/// Precomputed long-time scattering solution for a Lorentzian input photon.
class ScatteringModel {
public:
    ScatteringModel(const SystemParams& p, const MechanicalState& state, const WavePacket& wp);

    /// (detected, undetected) spectral densities at one detuning.
    std::pair<double, double> densities(double delta) const;
    double detected(double delta) const { return densities(delta).first; }
    double undetected(double delta) const { return densities(delta).second; }

    /// Integral of detected plus undetected density over the real line.
    double total_probability() const;
    /// Detected and undetected integrals separately.
    std::pair<double, double> channel_probabilities() const;

    const SystemParams& params() const { return params_; }
    const WavePacket& wavepacket() const { return wp_; }
    int levels() const { return std::max({l_levels_, n_levels_, m_levels_}); }

private:
    std::vector<double> breakpoints() const;

    SystemParams params_;
    DerivedParams derived_;
    WavePacket wp_;
    int l_levels_ = 0;
    int n_levels_ = 0;
    int m_levels_ = 0;
    std::vector<double> fc_beta_;  // [m * n_levels + n] = <m|D(beta)|n>

    struct Component {
        double weight = 1.0;
        std::vector<double> direct;    // a_l, padded to m_levels
        std::vector<double> weighted;  // [n * l_levels + l] = <n|D(-beta)|l> a_l
        int l_lo = 0;                  // [l_lo, l_hi) holds the non-negligible a_l
        int l_hi = 0;
        int n_count = 0;  // per-component truncations, never above the global ones
        int m_count = 0;
    };
    std::vector<Component> components_;
    std::vector<double> cavity_features_;  // sideband centers carrying weight
    std::vector<double> packet_features_;
};

struct ScatteringSpectra {
    Spectrum detected;
    Spectrum undetected;
};

ScatteringSpectra scattering_spectra(const SystemParams& p, const MechanicalState& state, const WavePacket& wp,
                                     const SpectralGrid& grid);

/// Detected-channel spectrum.
Spectrum scattering_spectrum(const SystemParams& p, const MechanicalState& state, const WavePacket& wp,
                             const SpectralGrid& grid);

double total_scattering_probability(const SystemParams& p, const MechanicalState& state, const WavePacket& wp);

}  // namespace optoforce
