#include "optoforce/emission.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "optoforce/errors.hpp"
#include "quadrature.hpp"

namespace optoforce {

using cplx = std::complex<double>;

std::complex<double> emission_amplitude(const SystemParams& p, const DerivedParams& dp,
                                        const FranckCondonTable& fc_beta, const FranckCondonTable& fc_minus_beta1,
                                        int m0, int m, double delta_k) {
    const int size = std::min(fc_beta.size(), fc_minus_beta1.size());
    if (m0 < 0 || m < 0 || m0 >= size || m >= size) {
        throw InputError("phonon index outside the Franck-Condon tables");
    }
    cplx sum = 0.0;
    for (int n = 0; n < size; ++n) {
        const cplx denom(delta_k + dp.lambda - (n - m) * p.omega_M, 0.5 * dp.gamma);
        sum += fc_beta(m, n) * fc_minus_beta1(n, m0) / denom;
    }
    return std::sqrt(p.gamma_c / (2.0 * std::numbers::pi)) * sum;
}

EmissionModel::EmissionModel(const SystemParams& p, const MechanicalState& state)
    : params_(p), derived_(derived_params(p)) {
    validate(p);
    const double to_one_photon = -derived_.beta1;
    const int adaptive = adaptive_truncation(to_one_photon, state, kProjectionTol);
    n_levels_ = std::min(std::max(adaptive + kGuardLevels, state.truncation()), kTruncationCap);
    const auto projected = displaced_projection(state, to_one_photon, fc_table(to_one_photon, n_levels_));
    m_levels_ = incoherent_truncation(derived_.beta, projected, kFinalSumTol);

    const auto fc = fc_table(derived_.beta, std::max(n_levels_, m_levels_));
    for (const auto& comp : projected) {
        std::vector<double> w(static_cast<std::size_t>(m_levels_) * n_levels_);
        for (int m = 0; m < m_levels_; ++m) {
            for (int n = 0; n < n_levels_; ++n) {
                w[static_cast<std::size_t>(m) * n_levels_ + n] = fc(m, n) * comp.coeffs[n];
            }
        }
        weights_.push_back(comp.weight);
        weighted_.push_back(std::move(w));
    }
}

double EmissionModel::density(double delta) const {
    const int N = n_levels_;
    const int M = m_levels_;
    // kappa[j + M - 1] = 1 / (delta + lambda - j omega_M + i gamma/2), j = n - m
    std::vector<cplx> kappa(static_cast<std::size_t>(N + M - 1));
    for (int j = -(M - 1); j < N; ++j) {
        kappa[j + M - 1] = 1.0 / cplx(delta + derived_.lambda - j * params_.omega_M, 0.5 * derived_.gamma);
    }
    double total = 0.0;
    for (std::size_t c = 0; c < weighted_.size(); ++c) {
        const auto& w = weighted_[c];
        double acc = 0.0;
        for (int m = 0; m < M; ++m) {
            const double* row = w.data() + static_cast<std::size_t>(m) * N;
            const cplx* k = kappa.data() + (M - 1 - m);
            cplx amp = 0.0;
            for (int n = 0; n < N; ++n) {
                amp += row[n] * k[n];
            }
            acc += std::norm(amp);
        }
        total += weights_[c] * acc;
    }
    return total * params_.gamma_c / (2.0 * std::numbers::pi);
}

std::vector<double> EmissionModel::populated_sidebands(double min_weight) const {
    const int N = n_levels_;
    const int M = m_levels_;
    std::vector<double> weight(static_cast<std::size_t>(N + M - 1), 0.0);
    for (std::size_t c = 0; c < weighted_.size(); ++c) {
        for (int m = 0; m < M; ++m) {
            for (int n = 0; n < N; ++n) {
                const double v = weighted_[c][static_cast<std::size_t>(m) * N + n];
                weight[n - m + M - 1] += weights_[c] * v * v;
            }
        }
    }
    std::vector<double> positions;
    for (int j = -(M - 1); j < N; ++j) {
        if (weight[j + M - 1] > min_weight) {
            positions.push_back(j * params_.omega_M - derived_.lambda);
        }
    }
    return positions;
}

double EmissionModel::total_probability() const {
    std::vector<double> breaks;
    for (double pos : populated_sidebands(1e-16)) {
        detail::add_feature_breaks(breaks, pos, 0.5 * derived_.gamma);
    }
    return detail::integrate_real_line([this](double x) { return density(x); }, std::move(breaks));
}

Spectrum emission_spectrum(const SystemParams& p, const MechanicalState& state, const SpectralGrid& grid) {
    validate(p);
    Spectrum sp;
    sp.grid = grid;
    sp.meta.warnings = validate(grid, p.gamma_c + p.gamma_d);
    const EmissionModel model(p, state);

    const std::size_t n = grid.size();
    sp.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        sp.values[i] = model.density(grid.at(i));
    }

    for (double pos : model.populated_sidebands(1e-4)) {
        if (pos < grid.delta_min || pos > grid.last()) {
            std::ostringstream msg;
            msg << "grid does not cover the populated sideband at " << pos;
            warn(msg.str());
            sp.meta.warnings.push_back(msg.str());
        }
    }
    sp.meta.kind = SpectrumKind::emission;
    sp.meta.params = p;
    sp.meta.state = state.describe();
    sp.meta.phonon_levels = std::max(model.intermediate_levels(), model.final_levels());
    return sp;
}

}  // namespace optoforce
