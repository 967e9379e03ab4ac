#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "optoforce/core_model.hpp"
#include "optoforce/mech_states.hpp"
#include "optoforce/spectrum.hpp"

namespace optoforce {

/// Equally spaced bath modes on [-window, window] with flat hopping strengths
/// sqrt(rate * spacing / 2pi), one copy per output channel.
struct BathDiscretization {
    double window = 6.0;
    int n_modes = 0;
    double spacing = 0.0;
    double gamma_c = 0.0;
    double gamma_d = 0.0;
    double xi = 0.0;   // detected-channel hopping per mode
    double chi = 0.0;  // undetected-channel hopping per mode
    // Subtract the principal-value shift a band of half-width `window` imposes on
    // the cavity levels, so the band mimics an unbounded flat continuum.
    bool band_correction = true;

    double detuning(int k) const { return -window + k * spacing; }
    double recurrence_time() const;
    SpectralGrid grid() const { return SpectralGrid{-window, -window + (n_modes - 1) * spacing, spacing}; }
};

BathDiscretization make_bath(const SystemParams& p, double window, int n_modes);

/// Single-excitation amplitudes: A over one-photon displaced levels, B and C
/// over zero-photon displaced levels times bath modes (row-major [m][k]).
struct AmplitudeSet {
    int levels = 0;
    int n_modes = 0;
    std::vector<std::complex<double>> A;
    std::vector<std::complex<double>> B;
    std::vector<std::complex<double>> C;
    double time = 0.0;

    double norm2() const;
    double cavity_population() const;
};

/// Photon in the cavity, mirror in `coeffs` (bare Fock basis):
/// A_m(0) = <m~(1)|psi>, B = C = 0.
AmplitudeSet emission_initial_state(const SystemParams& p, const std::vector<double>& coeffs, int levels,
                                    const BathDiscretization& bath);

/// Lorentzian photon in the detected bath:
/// B_{m,k}(0) = sqrt(eps * spacing / pi) / (dk - d0 + i eps) <m~(0)|psi>.
/// The part of the wavepacket outside the bath window is dropped, not renormalized.
AmplitudeSet scattering_initial_state(const SystemParams& p, const std::vector<double>& coeffs, const WavePacket& wp,
                                      int levels, const BathDiscretization& bath);

struct EvolveStats {
    double max_norm_drift = 0.0;
    int steps = 0;
    int matvecs = 0;
};

/// Relative norm drift that aborts an evolution.
inline constexpr double kNormDriftTol = 1e-6;

/// Propagates the coupled amplitude equations from initial.time to t_end.
///
/// The Hamiltonian is time independent, so each fixed step of length dt applies
/// a Chebyshev expansion of exp(-i H dt) truncated at double precision. Norm is
/// checked after every step; a drift above kNormDriftTol throws NormDriftError.
AmplitudeSet evolve(const SystemParams& p, const AmplitudeSet& initial, const BathDiscretization& bath, double t_end,
                    double dt, EvolveStats* stats = nullptr);

enum class Channel { detected, undetected };

/// Bath occupation density sum_m |B_{m,k}|^2 / spacing at the mode detunings.
/// Throws OracleRefusal when final.time lies outside [5/gamma, recurrence/2].
Spectrum oracle_spectrum(const AmplitudeSet& final_state, const BathDiscretization& bath,
                         Channel channel = Channel::detected);

struct OracleSettings {
    std::optional<double> window;
    std::optional<int> n_modes;
    std::optional<double> t_end;
    std::optional<double> dt;
    std::optional<bool> band_correction;
};

struct OracleReport {
    Spectrum oracle;
    Spectrum analytic;
    double relative_l2 = 0.0;
    double norm_drift = 0.0;
    double initial_norm = 0.0;
    double final_cavity_population = 0.0;
    BathDiscretization bath;
    int levels = 0;
    double t_end = 0.0;
    double dt = 0.0;
    int steps = 0;
    int matvecs = 0;
    std::vector<std::string> warnings;
};

/// Default Chebyshev step, in units of 1/omega_M.
inline constexpr double kDefaultOracleStep = 5.0;

/// Emission oracle: defaults window 6 omega_M, spacing gamma/4, t_end 10/gamma.
OracleReport run_emission_oracle(const SystemParams& p, const MechanicalState& state,
                                 const OracleSettings& settings = {});

/// Scattering oracle: t_end max(10/gamma, 10/eps), spacing min(gamma, 2 eps)/4
/// (narrowed further when the recurrence bound requires it).
OracleReport run_scattering_oracle(const SystemParams& p, const MechanicalState& state, const WavePacket& wp,
                                   const OracleSettings& settings = {});

}  // namespace optoforce
