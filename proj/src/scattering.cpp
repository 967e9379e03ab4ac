#include "optoforce/scattering.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "optoforce/emission.hpp"
#include "optoforce/errors.hpp"
#include "quadrature.hpp"

namespace optoforce {

using cplx = std::complex<double>;
using namespace std::complex_literals;

void validate(const WavePacket& wp) {
    if (!(wp.epsilon > 0.0) || !std::isfinite(wp.epsilon)) {
        throw InputError("wavepacket width epsilon must be positive");
    }
    if (!std::isfinite(wp.delta0)) {
        throw InputError("wavepacket center must be finite");
    }
}

WavePacket resonant_wavepacket(const SystemParams& p, double epsilon) {
    return WavePacket{-derived_params(p).lambda, epsilon};
}

SpectralGrid default_scattering_grid(const SystemParams& p, const WavePacket& wp) {
    const double gamma = p.gamma_c + p.gamma_d;
    return SpectralGrid{
        std::min(wp.delta0 - 4.0 * wp.epsilon, -3.0 * p.omega_M),
        std::max(wp.delta0 + 4.0 * wp.epsilon, 1.0 * p.omega_M),
        std::min(gamma, 2.0 * wp.epsilon) / 20.0,
    };
}

namespace {

cplx scattered_sum(const SystemParams& p, const DerivedParams& dp, const FranckCondonTable& fc_beta,
                   const FranckCondonTable& fc_minus_beta, int l, int m, double delta, const WavePacket& wp) {
    const int size = std::min(fc_beta.size(), fc_minus_beta.size());
    if (l < 0 || m < 0 || l >= size || m >= size) {
        throw InputError("phonon index outside the Franck-Condon tables");
    }
    const cplx input = 1.0 / cplx(delta - wp.delta0 - (l - m) * p.omega_M, wp.epsilon);
    cplx sum = 0.0;
    for (int n = 0; n < size; ++n) {
        const cplx cavity = 1.0 / cplx(delta + dp.lambda - (n - m) * p.omega_M, 0.5 * dp.gamma);
        sum += fc_beta(m, n) * fc_minus_beta(n, l) * cavity;
    }
    return sum * input;
}

}  // namespace

std::complex<double> scattering_amplitude_B(const SystemParams& p, const DerivedParams& dp,
                                            const FranckCondonTable& fc_beta, const FranckCondonTable& fc_minus_beta,
                                            int l, int m, double delta_k, const WavePacket& wp) {
    const cplx scattered = scattered_sum(p, dp, fc_beta, fc_minus_beta, l, m, delta_k, wp);
    const cplx direct = (m == l) ? 1.0 / cplx(delta_k - wp.delta0, wp.epsilon) : cplx(0.0);
    return std::sqrt(wp.epsilon / std::numbers::pi) * (direct - 1i * p.gamma_c * scattered);
}

std::complex<double> scattering_amplitude_C(const SystemParams& p, const DerivedParams& dp,
                                            const FranckCondonTable& fc_beta, const FranckCondonTable& fc_minus_beta,
                                            int l, int m, double delta_q, const WavePacket& wp) {
    const cplx scattered = scattered_sum(p, dp, fc_beta, fc_minus_beta, l, m, delta_q, wp);
    return -std::sqrt(wp.epsilon / std::numbers::pi) * 1i * std::sqrt(p.gamma_c * p.gamma_d) * scattered;
}

ScatteringModel::ScatteringModel(const SystemParams& p, const MechanicalState& state, const WavePacket& wp)
    : params_(p), derived_(derived_params(p)), wp_(wp) {
    validate(p);
    validate(wp);
    // Initial state in the zero-photon displaced basis: a_l = <l~(0)|psi>.
    const double to_zero_photon = -derived_.beta0;
    const int adaptive = adaptive_truncation(to_zero_photon, state, kProjectionTol);
    l_levels_ = std::min(std::max(adaptive + kGuardLevels, state.truncation()), kTruncationCap);
    const auto projected = displaced_projection(state, to_zero_photon, fc_table(to_zero_photon, l_levels_));

    n_levels_ =
        std::min(incoherent_truncation(-derived_.beta, projected, kProjectionTol) + kGuardLevels, kTruncationCap);
    const auto up = fc_table(-derived_.beta, std::max(n_levels_, l_levels_));

    std::vector<StateComponent> intermediate;
    for (const auto& comp : projected) {
        std::vector<double> occ(static_cast<std::size_t>(n_levels_), 0.0);
        for (int n = 0; n < n_levels_; ++n) {
            double acc = 0.0;
            for (int l = 0; l < l_levels_; ++l) {
                const double v = up(n, l) * comp.coeffs[l];
                acc += v * v;
            }
            occ[n] = std::sqrt(acc);
        }
        intermediate.push_back({comp.weight, std::move(occ)});
    }
    m_levels_ = std::max(incoherent_truncation(derived_.beta, intermediate, kFinalSumTol), l_levels_);
    const auto down = fc_table(derived_.beta, std::max(m_levels_, n_levels_));

    fc_beta_.resize(static_cast<std::size_t>(m_levels_) * n_levels_);
    for (int m = 0; m < m_levels_; ++m) {
        for (int n = 0; n < n_levels_; ++n) {
            fc_beta_[static_cast<std::size_t>(m) * n_levels_ + n] = down(m, n);
        }
    }

    // Sideband weights (incoherent estimate) decide which features get quadrature breakpoints.
    std::vector<double> cavity_weight(static_cast<std::size_t>(m_levels_ + n_levels_ - 1), 0.0);
    std::vector<double> packet_weight(static_cast<std::size_t>(m_levels_ + l_levels_ - 1), 0.0);

    for (std::size_t c = 0; c < projected.size(); ++c) {
        const auto& comp = projected[c];
        Component out;
        out.weight = comp.weight;
        out.direct.assign(static_cast<std::size_t>(m_levels_), 0.0);
        std::copy(comp.coeffs.begin(), comp.coeffs.begin() + l_levels_, out.direct.begin());
        out.weighted.resize(static_cast<std::size_t>(n_levels_) * l_levels_);
        for (int n = 0; n < n_levels_; ++n) {
            for (int l = 0; l < l_levels_; ++l) {
                out.weighted[static_cast<std::size_t>(n) * l_levels_ + l] = up(n, l) * comp.coeffs[l];
            }
        }
        // Thermal components are nearly Fock states; trimming negligible a_l
        // and the per-component level counts keeps densities() affordable.
        double peak = 0.0;
        for (int l = 0; l < l_levels_; ++l) {
            peak = std::max(peak, std::abs(comp.coeffs[l]));
        }
        out.l_lo = 0;
        out.l_hi = l_levels_;
        while (out.l_lo < out.l_hi && std::abs(comp.coeffs[out.l_lo]) <= 1e-15 * peak) {
            ++out.l_lo;
        }
        while (out.l_hi > out.l_lo && std::abs(comp.coeffs[out.l_hi - 1]) <= 1e-15 * peak) {
            --out.l_hi;
        }
        const StateComponent single[] = {comp};
        out.n_count = std::min(incoherent_truncation(-derived_.beta, single, kProjectionTol) + kGuardLevels, n_levels_);
        const StateComponent mid[] = {intermediate[c]};
        out.m_count = std::min(std::max(incoherent_truncation(derived_.beta, mid, kFinalSumTol), out.l_hi), m_levels_);

        for (int m = 0; m < out.m_count; ++m) {
            const double* f_row = fc_beta_.data() + static_cast<std::size_t>(m) * n_levels_;
            for (int n = 0; n < out.n_count; ++n) {
                const double occ = intermediate[c].coeffs[n];
                cavity_weight[n - m + m_levels_ - 1] += comp.weight * f_row[n] * f_row[n] * occ * occ;
            }
            for (int l = out.l_lo; l < out.l_hi; ++l) {
                double reach = 0.0;
                for (int n = 0; n < out.n_count; ++n) {
                    reach += std::abs(f_row[n] * out.weighted[static_cast<std::size_t>(n) * l_levels_ + l]);
                }
                packet_weight[l - m + m_levels_ - 1] += comp.weight * reach * reach;
            }
        }
        components_.push_back(std::move(out));
    }
    constexpr double kFeatureWeight = 1e-14;
    const double wm = params_.omega_M;
    for (int j = -(m_levels_ - 1); j < n_levels_; ++j) {
        if (cavity_weight[j + m_levels_ - 1] > kFeatureWeight) {
            cavity_features_.push_back(j * wm - derived_.lambda);
        }
    }
    for (int j = -(m_levels_ - 1); j < l_levels_; ++j) {
        if (j == 0 || packet_weight[j + m_levels_ - 1] > kFeatureWeight) {
            packet_features_.push_back(wp_.delta0 + j * wm);
        }
    }
}

std::pair<double, double> ScatteringModel::densities(double delta) const {
    const int L = l_levels_;
    const int N = n_levels_;
    const int M = m_levels_;
    const double wm = params_.omega_M;

    // kappa[j + M - 1], j = n - m; phi[j + M - 1], j = l - m
    std::vector<cplx> kappa(static_cast<std::size_t>(N + M - 1));
    for (int j = -(M - 1); j < N; ++j) {
        kappa[j + M - 1] = 1.0 / cplx(delta + derived_.lambda - j * wm, 0.5 * derived_.gamma);
    }
    std::vector<cplx> phi(static_cast<std::size_t>(L + M - 1));
    for (int j = -(M - 1); j < L; ++j) {
        phi[j + M - 1] = 1.0 / cplx(delta - wp_.delta0 - j * wm, wp_.epsilon);
    }

    const double prefactor = wp_.epsilon / std::numbers::pi;
    const double cross = std::sqrt(params_.gamma_c * params_.gamma_d);
    double detected = 0.0;
    double undetected = 0.0;
    for (const auto& comp : components_) {
        const auto& w = comp.weighted;
        const auto& a = comp.direct;
        double det = 0.0;
        double und = 0.0;
        for (int m = 0; m < comp.m_count; ++m) {
            const cplx* phi_m = phi.data() + (M - 1 - m);
            const cplx* kappa_m = kappa.data() + (M - 1 - m);
            const double* f_row = fc_beta_.data() + static_cast<std::size_t>(m) * N;
            cplx scattered = 0.0;
            for (int n = 0; n < comp.n_count; ++n) {
                const double* w_row = w.data() + static_cast<std::size_t>(n) * L;
                cplx inner = 0.0;
                for (int l = comp.l_lo; l < comp.l_hi; ++l) {
                    inner += w_row[l] * phi_m[l];
                }
                scattered += f_row[n] * kappa_m[n] * inner;
            }
            const cplx b = a[m] * phi_m[m] - 1i * params_.gamma_c * scattered;
            det += std::norm(b);
            und += cross * cross * std::norm(scattered);
        }
        detected += comp.weight * det;
        undetected += comp.weight * und;
    }
    return {prefactor * detected, prefactor * undetected};
}

std::vector<double> ScatteringModel::breakpoints() const {
    std::vector<double> breaks;
    for (double x : cavity_features_) {
        detail::add_feature_breaks(breaks, x, 0.5 * derived_.gamma);
    }
    for (double x : packet_features_) {
        detail::add_feature_breaks(breaks, x, wp_.epsilon);
    }
    return breaks;
}

double ScatteringModel::total_probability() const {
    return detail::integrate_real_line(
        [this](double x) {
            const auto [d, u] = densities(x);
            return d + u;
        },
        breakpoints());
}

std::pair<double, double> ScatteringModel::channel_probabilities() const {
    // Both channels ride on one adaptive pass as the real and imaginary parts.
    const cplx both = detail::integrate_real_line(
        [this](double x) {
            const auto [d, u] = densities(x);
            return cplx(d, u);
        },
        breakpoints());
    return {both.real(), both.imag()};
}

ScatteringSpectra scattering_spectra(const SystemParams& p, const MechanicalState& state, const WavePacket& wp,
                                     const SpectralGrid& grid) {
    validate(p);
    validate(wp);
    const double gamma = p.gamma_c + p.gamma_d;
    auto warnings = validate(grid, gamma);
    if (grid.step > 2.0 * wp.epsilon / 10.0) {
        std::ostringstream msg;
        msg << "grid step " << grid.step << " does not resolve the wavepacket width " << wp.epsilon;
        warn(msg.str());
        warnings.push_back(msg.str());
    }
    const ScatteringModel model(p, state, wp);
    ScatteringSpectra out;
    const std::size_t n = grid.size();
    out.detected.values.resize(n);
    out.undetected.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto [d, u] = model.densities(grid.at(i));
        out.detected.values[i] = d;
        out.undetected.values[i] = u;
    }
    for (auto* sp : {&out.detected, &out.undetected}) {
        sp->grid = grid;
        sp->meta.params = p;
        sp->meta.state = state.describe();
        sp->meta.wavepacket = wp;
        sp->meta.phonon_levels = model.levels();
        sp->meta.warnings = warnings;
    }
    out.detected.meta.kind = SpectrumKind::scattering_detected;
    out.undetected.meta.kind = SpectrumKind::scattering_undetected;
    return out;
}

Spectrum scattering_spectrum(const SystemParams& p, const MechanicalState& state, const WavePacket& wp,
                             const SpectralGrid& grid) {
    return scattering_spectra(p, state, wp, grid).detected;
}

double total_scattering_probability(const SystemParams& p, const MechanicalState& state, const WavePacket& wp) {
    return ScatteringModel(p, state, wp).total_probability();
}

}  // namespace optoforce
