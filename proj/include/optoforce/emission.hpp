#pragma once

#include <complex>
#include <vector>

#include "optoforce/core_model.hpp"
#include "optoforce/franck_condon.hpp"
#include "optoforce/mech_states.hpp"
#include "optoforce/spectrum.hpp"

namespace optoforce {

/// Extra phonon levels kept beyond the adaptive truncation.
inline constexpr int kGuardLevels = 10;
/// Tolerance for the displaced-basis projection of the initial state.
inline constexpr double kProjectionTol = 1e-10;
/// Tolerance on the cumulative weight of the final phonon sum.
inline constexpr double kFinalSumTol = 1e-8;

/// Long-time amplitude B_{m0,m}(delta_k) with the unit-modulus time phase dropped:
///   sqrt(gamma_c/2pi) sum_n <m|D(beta)|n><n|D(-beta1)|m0> / (delta_k + lambda - (n-m) omega_M + i gamma/2).
/// fc_beta must have displacement beta and fc_minus_beta1 displacement -beta1;
/// the phonon sum runs over the common table size.
std::complex<double> emission_amplitude(const SystemParams& p, const DerivedParams& dp,
                                        const FranckCondonTable& fc_beta, const FranckCondonTable& fc_minus_beta1,
                                        int m0, int m, double delta_k);

/// Precomputed emission spectrum for one parameter set and initial mirror state.
class EmissionModel {
public:
    EmissionModel(const SystemParams& p, const MechanicalState& state);

    /// Spectral density S(delta) per unit frequency (pure states sum coherently
    /// over m0, mixed states average the single-m0 spectra).
    double density(double delta) const;

    /// Integral of density over the whole real line by adaptive quadrature.
    double total_probability() const;

    int intermediate_levels() const { return n_levels_; }
    int final_levels() const { return m_levels_; }
    const SystemParams& params() const { return params_; }
    const DerivedParams& derived() const { return derived_; }

    /// Sideband positions (n-m) omega_M - lambda whose incoherent weight exceeds `min_weight`.
    std::vector<double> populated_sidebands(double min_weight) const;

private:
    SystemParams params_;
    DerivedParams derived_;
    int n_levels_ = 0;
    int m_levels_ = 0;
    // weighted[c][m * n_levels + n] = F(m, n) * c_n for component c
    std::vector<double> weights_;
    std::vector<std::vector<double>> weighted_;
};

Spectrum emission_spectrum(const SystemParams& p, const MechanicalState& state, const SpectralGrid& grid);

}  // namespace optoforce
