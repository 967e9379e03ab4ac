#include "optoforce/oracle_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/bessel.hpp>

#include "optoforce/emission.hpp"
#include "optoforce/errors.hpp"
#include "optoforce/franck_condon.hpp"
#include "optoforce/scattering.hpp"

namespace optoforce {

using cplx = std::complex<double>;
using namespace std::complex_literals;

double BathDiscretization::recurrence_time() const { return 2.0 * std::numbers::pi / spacing; }

BathDiscretization make_bath(const SystemParams& p, double window, int n_modes) {
    if (!(window > 0.0) || n_modes < 2) {
        throw InputError("bath discretization needs a positive window and at least two modes");
    }
    BathDiscretization bath;
    bath.window = window;
    bath.n_modes = n_modes;
    bath.spacing = 2.0 * window / (n_modes - 1);
    bath.gamma_c = p.gamma_c;
    bath.gamma_d = p.gamma_d;
    bath.xi = std::sqrt(p.gamma_c * bath.spacing / (2.0 * std::numbers::pi));
    bath.chi = std::sqrt(p.gamma_d * bath.spacing / (2.0 * std::numbers::pi));
    return bath;
}

double AmplitudeSet::norm2() const {
    double s = 0.0;
    for (const auto* v : {&A, &B, &C}) {
        for (const auto& z : *v) {
            s += std::norm(z);
        }
    }
    return s;
}

double AmplitudeSet::cavity_population() const {
    double s = 0.0;
    for (const auto& z : A) {
        s += std::norm(z);
    }
    return s;
}

namespace {

AmplitudeSet empty_set(int levels, const BathDiscretization& bath) {
    AmplitudeSet set;
    set.levels = levels;
    set.n_modes = bath.n_modes;
    set.A.assign(static_cast<std::size_t>(levels), 0.0);
    set.B.assign(static_cast<std::size_t>(levels) * bath.n_modes, 0.0);
    set.C.assign(static_cast<std::size_t>(levels) * bath.n_modes, 0.0);
    return set;
}

std::vector<double> project(const std::vector<double>& coeffs, double d, int levels) {
    const int size = std::max(levels, static_cast<int>(coeffs.size()));
    const auto fc = fc_table(d, size);
    std::vector<double> out(static_cast<std::size_t>(levels), 0.0);
    for (int j = 0; j < levels; ++j) {
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            out[j] += fc(j, static_cast<int>(i)) * coeffs[i];
        }
    }
    return out;
}

// Hamiltonian of the single-excitation sector on the layout [A | B | C],
// applied in shifted and scaled form (H - center)/radius.
class SectorHamiltonian {
public:
    SectorHamiltonian(const SystemParams& p, int levels, const BathDiscretization& bath)
        : levels_(levels), modes_(bath.n_modes), xi_(bath.xi), chi_(bath.chi), fc_(fc_table(p.g0 / p.omega_M, levels)) {
        const auto dp = derived_params(p);
        const double one_photon_shift = (p.g0 + p.eta) * (p.g0 + p.eta) / p.omega_M;
        diag_a_.resize(static_cast<std::size_t>(levels));
        for (int m = 0; m < levels; ++m) {
            diag_a_[m] = m * p.omega_M - one_photon_shift;
        }
        if (bath.band_correction) {
            // Continuum estimate of sum_k xi^2/(w - dk) over [-W, W] for every
            // decay channel n -> m, weighted by its overlap.
            const double rate = (bath.gamma_c + bath.gamma_d) / (2.0 * std::numbers::pi);
            const double W = bath.window;
            for (int n = 0; n < levels; ++n) {
                double shift = 0.0;
                for (int m = 0; m < levels; ++m) {
                    const double w = (n - m) * p.omega_M - dp.lambda;
                    const double upper = std::max(std::abs(W + w), bath.spacing);
                    const double lower = std::max(std::abs(W - w), bath.spacing);
                    shift += fc_(m, n) * fc_(m, n) * rate * std::log(upper / lower);
                }
                diag_a_[n] -= shift;
            }
        }
        diag_b_.resize(static_cast<std::size_t>(levels) * modes_);
        for (int m = 0; m < levels; ++m) {
            for (int k = 0; k < modes_; ++k) {
                diag_b_[static_cast<std::size_t>(m) * modes_ + k] = m * p.omega_M + bath.detuning(k) - dp.zeta;
            }
        }
        double lo = std::min(*std::min_element(diag_a_.begin(), diag_a_.end()),
                             *std::min_element(diag_b_.begin(), diag_b_.end()));
        double hi = std::max(*std::max_element(diag_a_.begin(), diag_a_.end()),
                             *std::max_element(diag_b_.begin(), diag_b_.end()));
        // |V| <= sqrt(K (xi^2 + chi^2)) times the norm of the truncated overlap matrix (<= 1).
        const double coupling = std::sqrt(modes_ * (xi_ * xi_ + chi_ * chi_));
        lo -= coupling;
        hi += coupling;
        center_ = 0.5 * (hi + lo);
        radius_ = 0.5 * (hi - lo) * 1.01 + 1e-12;
        sum_b_.resize(static_cast<std::size_t>(levels));
        down_.resize(static_cast<std::size_t>(levels));
    }

    double center() const { return center_; }
    double radius() const { return radius_; }
    std::size_t dim() const { return static_cast<std::size_t>(levels_) * (1 + 2 * modes_); }

    // out = (H - center)/radius * in
    void apply(const std::vector<cplx>& in, std::vector<cplx>& out) {
        const int L = levels_;
        const int K = modes_;
        const cplx* a = in.data();
        const cplx* b = a + L;
        const cplx* c = b + static_cast<std::size_t>(L) * K;
        cplx* oa = out.data();
        cplx* ob = oa + L;
        cplx* oc = ob + static_cast<std::size_t>(L) * K;
        const double inv_r = 1.0 / radius_;

        for (int n = 0; n < L; ++n) {
            cplx sb = 0.0;
            cplx sc = 0.0;
            const cplx* bn = b + static_cast<std::size_t>(n) * K;
            const cplx* cn = c + static_cast<std::size_t>(n) * K;
            for (int k = 0; k < K; ++k) {
                sb += bn[k];
                sc += cn[k];
            }
            sum_b_[n] = xi_ * sb + chi_ * sc;
        }
        // <m~(1)|n~(0)> = <n|D(beta)|m>
        for (int m = 0; m < L; ++m) {
            cplx acc = (diag_a_[m] - center_) * a[m];
            for (int n = 0; n < L; ++n) {
                acc += fc_(n, m) * sum_b_[n];
            }
            oa[m] = acc * inv_r;
        }
        // <m~(0)|n~(1)> = <m|D(beta)|n>
        for (int m = 0; m < L; ++m) {
            cplx acc = 0.0;
            for (int n = 0; n < L; ++n) {
                acc += fc_(m, n) * a[n];
            }
            down_[m] = acc;
        }
        for (int m = 0; m < L; ++m) {
            const std::size_t row = static_cast<std::size_t>(m) * K;
            const cplx fb = xi_ * down_[m];
            const cplx fcv = chi_ * down_[m];
            for (int k = 0; k < K; ++k) {
                const double e = diag_b_[row + k] - center_;
                ob[row + k] = (e * b[row + k] + fb) * inv_r;
                oc[row + k] = (e * c[row + k] + fcv) * inv_r;
            }
        }
    }

private:
    int levels_;
    int modes_;
    double xi_;
    double chi_;
    FranckCondonTable fc_;
    std::vector<double> diag_a_;
    std::vector<double> diag_b_;
    double center_ = 0.0;
    double radius_ = 1.0;
    std::vector<cplx> sum_b_;
    std::vector<cplx> down_;
};

std::vector<cplx> chebyshev_coefficients(double z) {
    // exp(-i z x) = sum_k c_k T_k(x), c_0 = J_0(z), c_k = 2 (-i)^k J_k(z)
    std::vector<cplx> coeffs;
    cplx phase = 1.0;
    for (int k = 0;; ++k) {
        const double j = boost::math::cyl_bessel_j(k, z);
        coeffs.push_back((k == 0 ? 1.0 : 2.0) * phase * j);
        phase *= -1i;
        if (k > z + 10 && std::abs(j) < 1e-17) {
            break;
        }
    }
    return coeffs;
}

}  // namespace

AmplitudeSet emission_initial_state(const SystemParams& p, const std::vector<double>& coeffs, int levels,
                                    const BathDiscretization& bath) {
    auto set = empty_set(levels, bath);
    const auto a = project(coeffs, -derived_params(p).beta1, levels);
    std::copy(a.begin(), a.end(), set.A.begin());
    return set;
}

AmplitudeSet scattering_initial_state(const SystemParams& p, const std::vector<double>& coeffs, const WavePacket& wp,
                                      int levels, const BathDiscretization& bath) {
    validate(wp);
    auto set = empty_set(levels, bath);
    const auto a = project(coeffs, -derived_params(p).beta0, levels);
    const double amp = std::sqrt(wp.epsilon * bath.spacing / std::numbers::pi);
    for (int k = 0; k < bath.n_modes; ++k) {
        const cplx packet = amp / cplx(bath.detuning(k) - wp.delta0, wp.epsilon);
        for (int m = 0; m < levels; ++m) {
            set.B[static_cast<std::size_t>(m) * bath.n_modes + k] = packet * a[m];
        }
    }
    return set;
}

AmplitudeSet evolve(const SystemParams& p, const AmplitudeSet& initial, const BathDiscretization& bath, double t_end,
                    double dt, EvolveStats* stats) {
    validate(p);
    if (initial.n_modes != bath.n_modes) {
        throw InputError("amplitude set does not match the bath discretization");
    }
    if (!(dt > 0.0)) {
        throw InputError("time step must be positive");
    }
    const double duration = t_end - initial.time;
    if (duration < 0.0) {
        throw InputError("t_end precedes the initial time");
    }
    const int L = initial.levels;
    const int K = bath.n_modes;
    SectorHamiltonian ham(p, L, bath);

    std::vector<cplx> psi(ham.dim());
    std::copy(initial.A.begin(), initial.A.end(), psi.begin());
    std::copy(initial.B.begin(), initial.B.end(), psi.begin() + L);
    std::copy(initial.C.begin(), initial.C.end(), psi.begin() + L + static_cast<std::ptrdiff_t>(L) * K);

    auto norm2 = [](const std::vector<cplx>& v) {
        double s = 0.0;
        for (const auto& z : v) {
            s += std::norm(z);
        }
        return s;
    };
    const double initial_norm = norm2(psi);

    const int steps = duration == 0.0 ? 0 : static_cast<int>(std::ceil(duration / dt - 1e-9));
    const double h = steps > 0 ? duration / steps : 0.0;
    const auto coeffs = chebyshev_coefficients(ham.radius() * h);
    const cplx global_phase = std::exp(-1i * ham.center() * h);

    std::vector<cplx> prev(psi.size()), curr(psi.size()), next(psi.size()), acc(psi.size());
    EvolveStats local;
    for (int s = 0; s < steps; ++s) {
        prev = psi;
        ham.apply(prev, curr);
        ++local.matvecs;
        for (std::size_t i = 0; i < psi.size(); ++i) {
            acc[i] = coeffs[0] * prev[i] + coeffs[1] * curr[i];
        }
        for (std::size_t k = 2; k < coeffs.size(); ++k) {
            ham.apply(curr, next);
            ++local.matvecs;
            const cplx ck = coeffs[k];
            for (std::size_t i = 0; i < psi.size(); ++i) {
                next[i] = 2.0 * next[i] - prev[i];
                acc[i] += ck * next[i];
            }
            std::swap(prev, curr);
            std::swap(curr, next);
        }
        for (std::size_t i = 0; i < psi.size(); ++i) {
            psi[i] = global_phase * acc[i];
        }
        const double drift = initial_norm > 0.0 ? std::abs(norm2(psi) - initial_norm) / initial_norm : 0.0;
        local.max_norm_drift = std::max(local.max_norm_drift, drift);
        ++local.steps;
        if (drift > kNormDriftTol) {
            std::ostringstream msg;
            msg << "norm drift " << drift << " exceeds " << kNormDriftTol << " at t = " << initial.time + (s + 1) * h;
            throw NormDriftError(msg.str());
        }
    }

    AmplitudeSet out = initial;
    std::copy(psi.begin(), psi.begin() + L, out.A.begin());
    std::copy(psi.begin() + L, psi.begin() + L + static_cast<std::ptrdiff_t>(L) * K, out.B.begin());
    std::copy(psi.begin() + L + static_cast<std::ptrdiff_t>(L) * K, psi.end(), out.C.begin());
    out.time = t_end;
    if (stats) {
        stats->max_norm_drift = std::max(stats->max_norm_drift, local.max_norm_drift);
        stats->steps += local.steps;
        stats->matvecs += local.matvecs;
    }
    return out;
}

Spectrum oracle_spectrum(const AmplitudeSet& final_state, const BathDiscretization& bath, Channel channel) {
    const double gamma = bath.gamma_c + bath.gamma_d;
    if (final_state.time < 5.0 / gamma || 2.0 * final_state.time > bath.recurrence_time()) {
        std::ostringstream msg;
        msg << "evolution horizon t = " << final_state.time << " is outside the long-time window [" << 5.0 / gamma
            << ", " << 0.5 * bath.recurrence_time() << "]";
        throw OracleRefusal(msg.str());
    }
    const auto& amps = channel == Channel::detected ? final_state.B : final_state.C;
    Spectrum sp;
    sp.grid = bath.grid();
    sp.values.assign(static_cast<std::size_t>(bath.n_modes), 0.0);
    for (int m = 0; m < final_state.levels; ++m) {
        for (int k = 0; k < bath.n_modes; ++k) {
            sp.values[k] += std::norm(amps[static_cast<std::size_t>(m) * bath.n_modes + k]);
        }
    }
    for (auto& v : sp.values) {
        v /= bath.spacing;
    }
    sp.meta.kind = channel == Channel::detected ? SpectrumKind::emission : SpectrumKind::scattering_undetected;
    sp.meta.phonon_levels = final_state.levels;
    return sp;
}

namespace {

struct ResolvedDiscretization {
    BathDiscretization bath;
    double t_end;
    double dt;
};

ResolvedDiscretization resolve(const SystemParams& p, const OracleSettings& settings, double default_window,
                               double default_spacing, double default_t_end, double min_t_end) {
    const double window = settings.window.value_or(default_window);
    const double t_end = settings.t_end.value_or(default_t_end);
    const double dt = settings.dt.value_or(kDefaultOracleStep / p.omega_M);
    if (!(window > 0.0) || !(t_end > 0.0) || !(dt > 0.0)) {
        throw InputError("oracle window, t_end and dt must be positive");
    }
    if (t_end < min_t_end) {
        std::ostringstream msg;
        msg << "t_end = " << t_end << " is shorter than the long-time horizon " << min_t_end;
        throw OracleRefusal(msg.str());
    }
    int n_modes = 0;
    if (settings.n_modes) {
        n_modes = *settings.n_modes;
    } else {
        double spacing = default_spacing;
        // Recurrence time 2pi/spacing must exceed twice the horizon.
        const double max_spacing = std::numbers::pi / t_end;
        if (spacing >= max_spacing) {
            spacing = 0.9 * max_spacing;
        }
        n_modes = static_cast<int>(std::ceil(2.0 * window / spacing)) + 1;
    }
    auto bath = make_bath(p, window, n_modes);
    bath.band_correction = settings.band_correction.value_or(true);
    if (bath.recurrence_time() <= 2.0 * t_end) {
        std::ostringstream msg;
        msg << "bath recurrence time " << bath.recurrence_time() << " does not exceed twice the horizon " << t_end;
        throw OracleRefusal(msg.str());
    }
    return {bath, t_end, dt};
}

template <class InitialFn>
void accumulate(OracleReport& report, const SystemParams& p, const MechanicalState& state, InitialFn&& initial_fn) {
    EvolveStats stats;
    report.oracle.values.assign(static_cast<std::size_t>(report.bath.n_modes), 0.0);
    report.initial_norm = 0.0;
    for (const auto& comp : state.components()) {
        if (comp.weight < 1e-12) {
            continue;
        }
        const AmplitudeSet start = initial_fn(comp.coeffs);
        report.initial_norm += comp.weight * start.norm2();
        const AmplitudeSet end = evolve(p, start, report.bath, report.t_end, report.dt, &stats);
        report.final_cavity_population += comp.weight * end.cavity_population();
        const Spectrum part = oracle_spectrum(end, report.bath, Channel::detected);
        for (std::size_t k = 0; k < part.values.size(); ++k) {
            report.oracle.values[k] += comp.weight * part.values[k];
        }
    }
    report.oracle.grid = report.bath.grid();
    report.oracle.meta.params = p;
    report.oracle.meta.state = state.describe();
    report.oracle.meta.phonon_levels = report.levels;
    report.norm_drift = stats.max_norm_drift;
    report.steps = stats.steps;
    report.matvecs = stats.matvecs;
    report.analytic.grid = report.oracle.grid;
    report.analytic.meta = report.oracle.meta;
}

}  // namespace

OracleReport run_emission_oracle(const SystemParams& p, const MechanicalState& state, const OracleSettings& settings) {
    validate(p);
    const double gamma = p.gamma_c + p.gamma_d;
    const auto res = resolve(p, settings, 6.0 * p.omega_M, gamma / 4.0, 10.0 / gamma, 5.0 / gamma);
    const EmissionModel model(p, state);

    OracleReport report;
    report.bath = res.bath;
    report.t_end = res.t_end;
    report.dt = res.dt;
    report.levels = std::max(model.intermediate_levels(), model.final_levels());
    for (double pos : model.populated_sidebands(1e-3)) {
        if (res.bath.window < 1.5 * std::abs(pos)) {
            std::ostringstream msg;
            msg << "bath window " << res.bath.window << " is below 1.5x the populated sideband at " << pos;
            warn(msg.str());
            report.warnings.push_back(msg.str());
        }
    }
    accumulate(report, p, state, [&](const std::vector<double>& coeffs) {
        return emission_initial_state(p, coeffs, report.levels, report.bath);
    });
    report.oracle.meta.kind = SpectrumKind::emission;
    report.analytic.meta.kind = SpectrumKind::emission;
    report.analytic.values.resize(report.oracle.values.size());
    for (std::size_t k = 0; k < report.analytic.values.size(); ++k) {
        report.analytic.values[k] = model.density(report.bath.detuning(static_cast<int>(k)));
    }
    report.relative_l2 = relative_l2(report.oracle.values, report.analytic.values);
    return report;
}

OracleReport run_scattering_oracle(const SystemParams& p, const MechanicalState& state, const WavePacket& wp,
                                   const OracleSettings& settings) {
    validate(p);
    validate(wp);
    const double gamma = p.gamma_c + p.gamma_d;
    const double window = std::max(6.0 * p.omega_M, std::abs(wp.delta0) + 4.0 * wp.epsilon + p.omega_M);
    const double t_end = std::max(10.0 / gamma, 10.0 / wp.epsilon);
    const double min_t_end = std::max(5.0 / gamma, 1.0 / wp.epsilon);
    const auto res = resolve(p, settings, window, std::min(gamma, 2.0 * wp.epsilon) / 4.0, t_end, min_t_end);
    const ScatteringModel model(p, state, wp);

    OracleReport report;
    report.bath = res.bath;
    report.t_end = res.t_end;
    report.dt = res.dt;
    report.levels = model.levels();
    accumulate(report, p, state, [&](const std::vector<double>& coeffs) {
        return scattering_initial_state(p, coeffs, wp, report.levels, report.bath);
    });
    report.oracle.meta.kind = SpectrumKind::scattering_detected;
    report.oracle.meta.wavepacket = wp;
    report.analytic.meta.kind = SpectrumKind::scattering_detected;
    report.analytic.meta.wavepacket = wp;
    report.analytic.values.resize(report.oracle.values.size());
    for (std::size_t k = 0; k < report.analytic.values.size(); ++k) {
        report.analytic.values[k] = model.detected(report.bath.detuning(static_cast<int>(k)));
    }
    report.relative_l2 = relative_l2(report.oracle.values, report.analytic.values);
    return report;
}

}  // namespace optoforce
