#include "optoforce/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/tools/minima.hpp>

#include "optoforce/emission.hpp"
#include "optoforce/errors.hpp"
#include "optoforce/scattering.hpp"

namespace optoforce {

namespace {

std::vector<Peak> maxima(const std::vector<double>& y, const SpectralGrid& grid, double threshold, double sign) {
    std::vector<Peak> out;
    const std::size_t n = y.size();
    std::size_t i = 1;
    while (i + 1 < n) {
        if (!(y[i] > y[i - 1])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < n && y[j + 1] == y[i]) {
            ++j;
        }
        if (j + 1 >= n || !(y[j + 1] < y[i])) {
            i = j + 1;
            continue;
        }
        const double top = y[i];
        double left_min = top;
        for (std::size_t k = i; k-- > 0;) {
            if (y[k] > top) {
                break;
            }
            left_min = std::min(left_min, y[k]);
        }
        double right_min = top;
        for (std::size_t k = j + 1; k < n; ++k) {
            if (y[k] > top) {
                break;
            }
            right_min = std::min(right_min, y[k]);
        }
        const double prominence = top - std::max(left_min, right_min);
        if (prominence >= threshold && prominence > 0.0) {
            Peak pk;
            if (i == j) {
                const double ym = y[i - 1];
                const double yp = y[i + 1];
                const double curv = ym - 2.0 * top + yp;
                const double offset = curv != 0.0 ? 0.5 * (ym - yp) / curv : 0.0;
                pk.position = grid.at(i) + offset * grid.step;
                pk.height = sign * (top - 0.25 * (ym - yp) * offset);
            } else {
                pk.position = 0.5 * (grid.at(i) + grid.at(j));
                pk.height = sign * top;
            }
            pk.prominence = prominence;
            out.push_back(pk);
        }
        i = j + 1;
    }
    return out;
}

std::optional<double> force_of(const std::optional<PhysicalParams>& phys, const SystemParams& p, double eta) {
    if (!phys) {
        return std::nullopt;
    }
    return force_from_eta(*phys, p, eta);
}

void finish(ForceEstimate& est, const SystemParams& p, const std::optional<PhysicalParams>& phys) {
    auto chosen = p;
    chosen.eta = est.eta_hat;
    est.resolvable = resolvability(chosen);
    est.f_hat = force_of(phys, p, est.eta_hat);
}

}  // namespace

PeakSet find_peaks(const Spectrum& sp, double rel_prominence) {
    if (sp.values.empty()) {
        throw InputError("cannot search peaks in an empty spectrum");
    }
    if (!(rel_prominence > 0.0 && rel_prominence < 1.0)) {
        throw InputError("relative prominence must lie in (0, 1)");
    }
    if (sp.values.size() != sp.grid.size()) {
        throw InputError("spectrum values do not match its grid");
    }
    double scale = 0.0;
    for (double v : sp.values) {
        scale = std::max(scale, std::abs(v));
    }
    const double threshold = rel_prominence * scale;
    PeakSet out;
    out.peaks = maxima(sp.values, sp.grid, threshold, 1.0);
    std::vector<double> negated(sp.values.size());
    std::transform(sp.values.begin(), sp.values.end(), negated.begin(), [](double v) { return -v; });
    out.dips = maxima(negated, sp.grid, threshold, -1.0);
    return out;
}

const char* to_string(InferenceMethod m) { return m == InferenceMethod::zpl ? "zpl" : "height"; }

InferenceMethod inference_method_from_string(const std::string& name) {
    if (name == "zpl") {
        return InferenceMethod::zpl;
    }
    if (name == "height") {
        return InferenceMethod::height;
    }
    throw InputError("unknown inference mode '" + name + "' (expected zpl or height)");
}

double branch_spacing(const SystemParams& p) {
    if (p.g0 == 0.0) {
        throw InferenceError("the ZPL position does not depend on the force when g0 = 0");
    }
    return p.omega_M * p.omega_M / (2.0 * std::abs(p.g0));
}

ForceEstimate estimate_force_zpl(const PeakSet& pk, const SystemParams& p, const Interval& prior,
                                 const std::optional<PhysicalParams>& phys) {
    if (!(prior.lo <= prior.hi)) {
        throw InputError("prior interval must satisfy lo <= hi");
    }
    const double spacing = branch_spacing(p);
    if (pk.peaks.empty()) {
        throw InferenceError("no peak qualifies as ZPL candidate");
    }
    const double target = -p.g0 * p.g0 / p.omega_M;
    const Peak* best = &pk.peaks.front();
    for (const auto& peak : pk.peaks) {
        const double d = std::abs(peak.position - target);
        const double d_best = std::abs(best->position - target);
        if (d < d_best || (d == d_best && peak.prominence > best->prominence)) {
            best = &peak;
        }
    }
    // position = -(g0^2 + 2 g0 eta)/omega_M  =>  eta = -position omega_M/(2 g0) - g0/2
    const double eta0 = -best->position * p.omega_M / (2.0 * p.g0) - 0.5 * p.g0;
    const double step = p.g0 > 0.0 ? spacing : -spacing;

    ForceEstimate est;
    est.method = InferenceMethod::zpl;
    est.zpl_position = best->position;
    const int l_lo = static_cast<int>(std::ceil((prior.lo - eta0) / spacing - 1e-12));
    const int l_hi = static_cast<int>(std::floor((prior.hi - eta0) / spacing + 1e-12));
    for (int l = std::min(l_lo, -l_hi); l <= std::max(l_hi, -l_lo); ++l) {
        const double eta = eta0 + l * step;
        if (eta < prior.lo - 1e-12 * spacing || eta > prior.hi + 1e-12 * spacing) {
            continue;
        }
        est.candidates.push_back({l, eta, std::abs(eta - prior.center()) / spacing});
    }
    if (est.candidates.empty()) {
        std::ostringstream msg;
        msg << "empty prior intersection: no branch eta_0 + l*" << spacing << " (eta_0 = " << eta0 << ") lies in ["
            << prior.lo << ", " << prior.hi << "]";
        throw InferenceError(msg.str());
    }
    std::sort(est.candidates.begin(), est.candidates.end(),
              [](const Candidate& a, const Candidate& b) { return a.eta < b.eta; });
    const auto chosen = std::min_element(est.candidates.begin(), est.candidates.end(),
                                         [](const Candidate& a, const Candidate& b) { return a.residual < b.residual; });
    est.eta_hat = chosen->eta;
    est.ambiguous = est.candidates.size() > 1;
    finish(est, p, phys);
    return est;
}

SystemParams ForwardModel::at(double eta) const {
    auto p = params;
    p.eta = eta;
    return p;
}

std::vector<double> ForwardModel::evaluate(double eta, const std::vector<double>& deltas) const {
    const auto p = at(eta);
    std::vector<double> out(deltas.size());
    if (kind == SpectrumKind::emission) {
        const EmissionModel model(p, state);
        std::transform(deltas.begin(), deltas.end(), out.begin(), [&](double d) { return model.density(d); });
        return out;
    }
    if (!wavepacket) {
        throw InputError("scattering forward model needs a wavepacket");
    }
    auto wp = *wavepacket;
    if (resonant) {
        wp.delta0 = -derived_params(p).lambda;
    }
    const ScatteringModel model(p, state, wp);
    const bool detected = kind == SpectrumKind::scattering_detected;
    std::transform(deltas.begin(), deltas.end(), out.begin(), [&](double d) {
        const auto [det, und] = model.densities(d);
        return detected ? det : und;
    });
    return out;
}

std::vector<double> ForwardModel::spectrum(double eta, const SpectralGrid& grid) const {
    std::vector<double> deltas(grid.size());
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        deltas[i] = grid.at(i);
    }
    return evaluate(eta, deltas);
}

double ForwardModel::density(double eta, double delta) const { return evaluate(eta, {delta}).front(); }

ForceEstimate disambiguate(const Spectrum& measured, const ForceEstimate& estimate, const ForwardModel& model,
                           const std::optional<PhysicalParams>& phys) {
    if (estimate.candidates.empty()) {
        throw InferenceError("no candidates to disambiguate");
    }
    if (estimate.candidates.size() == 1) {
        return estimate;
    }
    if (measured.values.empty() || measured.values.size() != measured.grid.size()) {
        throw InputError("measured spectrum is empty or inconsistent with its grid");
    }
    ForceEstimate out = estimate;
    for (auto& c : out.candidates) {
        c.residual = relative_l2(model.spectrum(c.eta, measured.grid), measured.values);
    }
    std::vector<Candidate> ranked = out.candidates;
    std::sort(ranked.begin(), ranked.end(),
              [](const Candidate& a, const Candidate& b) { return a.residual < b.residual; });
    const double r1 = ranked[0].residual;
    const double r2 = ranked[1].residual;
    if (r2 - r1 < kResidualTieFraction * r2) {
        std::ostringstream msg;
        msg << "unresolved: candidates eta = " << ranked[0].eta << " and " << ranked[1].eta
            << " have residuals within 1% (" << r1 << ", " << r2 << ")";
        throw InferenceError(msg.str());
    }
    out.eta_hat = ranked[0].eta;
    out.ambiguous = false;
    finish(out, model.params, phys);
    return out;
}

ForceEstimate estimate_force_height(const Spectrum& measured, double reference_point, const ForwardModel& model,
                                    const Interval& prior, const std::optional<PhysicalParams>& phys) {
    if (!(prior.lo < prior.hi)) {
        throw InputError("height method needs a prior interval with lo < hi");
    }
    const double target = sample(measured, reference_point);
    if (!(target > 0.0)) {
        throw InferenceError("measured spectrum height at the reference point is not positive");
    }
    auto height = [&](double eta) { return model.density(eta, reference_point); };
    auto objective = [&](double eta) {
        const double r = (height(eta) - target) / target;
        return r * r;
    };

    constexpr int kScan = 401;
    std::vector<double> etas(kScan), heights(kScan), values(kScan);
    for (int i = 0; i < kScan; ++i) {
        etas[i] = prior.lo + (prior.hi - prior.lo) * i / (kScan - 1);
        heights[i] = height(etas[i]);
        const double r = (heights[i] - target) / target;
        values[i] = r * r;
    }
    const auto [hmin, hmax] = std::minmax_element(heights.begin(), heights.end());
    // Spectra are truncated at 1e-8 cumulative weight, so smaller height changes are noise.
    if (*hmax - *hmin <= kFlatObjectiveTol * std::max(std::abs(*hmax), target)) {
        throw InferenceError("flat objective: the model height at the reference point does not depend on eta");
    }

    std::vector<std::pair<double, double>> minima;  // (eta, residual)
    for (int i = 0; i < kScan; ++i) {
        const bool left = i == 0 || values[i] <= values[i - 1];
        const bool right = i == kScan - 1 || values[i] < values[i + 1];
        if (!(left && right)) {
            continue;
        }
        const double a = etas[std::max(i - 1, 0)];
        const double b = etas[std::min(i + 1, kScan - 1)];
        auto [x, fx] = boost::math::tools::brent_find_minima(objective, a, b, 40);
        if (values[i] < fx) {
            x = etas[i];
            fx = values[i];
        }
        minima.emplace_back(x, fx);
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& m : minima) {
        best = std::min(best, m.second);
    }

    ForceEstimate est;
    est.method = InferenceMethod::height;
    for (const auto& [eta, res] : minima) {
        if (res <= 1.1 * best + 1e-12) {
            est.candidates.push_back({0, eta, res});
        }
    }
    const auto chosen = std::min_element(est.candidates.begin(), est.candidates.end(),
                                         [](const Candidate& a, const Candidate& b) { return a.residual < b.residual; });
    est.eta_hat = chosen->eta;
    const int chosen_index = static_cast<int>(chosen - est.candidates.begin());
    for (int i = 0; i < static_cast<int>(est.candidates.size()); ++i) {
        est.candidates[i].l = i - chosen_index;
    }
    est.ambiguous = est.candidates.size() > 1;

    const double h = 1e-4 * (prior.hi - prior.lo);
    const double x = std::clamp(est.eta_hat, prior.lo + h, prior.hi - h);
    est.curvature = (objective(x + h) - 2.0 * objective(x) + objective(x - h)) / (h * h);
    finish(est, model.params, phys);
    return est;
}

}  // namespace optoforce
