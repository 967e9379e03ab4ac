#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "optoforce/emission.hpp"
#include "optoforce/errors.hpp"
#include "optoforce/inference.hpp"
#include "optoforce/scattering.hpp"
#include "oracles.hpp"

using namespace optoforce;

namespace {

SystemParams baseline(double eta = 0.02) {
    SystemParams p;
    p.omega_M = 1.0;
    p.g0 = 0.8;
    p.eta = eta;
    p.gamma_c = 0.01;
    p.gamma_d = 0.01;
    return p;
}

ForwardModel emission_model(const SystemParams& p) {
    ForwardModel m;
    m.params = p;
    return m;
}

const PhysicalParams kPhys{2.0 * std::numbers::pi * 1e8, 0.4e-14};

struct Silence {
    WarningHandler previous = set_warning_handler({});
    ~Silence() { set_warning_handler(std::move(previous)); }
};

Spectrum lorentz(double center, double width, const SpectralGrid& grid) {
    Spectrum sp;
    sp.grid = grid;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.at(i) - center;
        sp.values.push_back(1.0 / (x * x + width * width));
    }
    return sp;
}

Spectrum synth_emission(double eta, const SpectralGrid& grid = {-4.0, 2.0, 0.001}) {
    Silence quiet;
    return emission_spectrum(baseline(eta), MechanicalState::number(0), grid);
}

ForceEstimate fig4_triple() {
    PeakSet pk;
    pk.peaks.push_back({-0.672, 1.0, 1.0});
    return estimate_force_zpl(pk, baseline(0.0), Interval{-0.7, 0.7}, kPhys);
}

}  // namespace

TEST_CASE("single Lorentzian gives one peak at its center") {
    const SpectralGrid grid{-1.0, 1.0, 0.001};
    for (double c : {-0.3217, 0.0, 0.5005}) {
        const auto pk = find_peaks(lorentz(c, 0.01, grid));
        REQUIRE(pk.peaks.size() == 1);
        CHECK(std::abs(pk.peaks[0].position - c) <= grid.step);
        CHECK(pk.dips.empty());
    }
}

TEST_CASE("flat spectrum has no peaks") {
    Spectrum sp;
    sp.grid = {0.0, 1.0, 0.01};
    sp.values.assign(sp.grid.size(), 2.5);
    const auto pk = find_peaks(sp);
    CHECK(pk.peaks.empty());
    CHECK(pk.dips.empty());
}

TEST_CASE("plateau maximum is reported once at its middle") {
    Spectrum sp;
    sp.grid = {0.0, 1.0, 0.1};
    sp.values = {0, 1, 2, 3, 3, 3, 2, 1, 0, 0, 0};
    const auto pk = find_peaks(sp, 0.1);
    REQUIRE(pk.peaks.size() == 1);
    CHECK(pk.peaks[0].position == doctest::Approx(0.4));
    CHECK(pk.peaks[0].height == 3.0);
}

TEST_CASE("dips are found on the negated signal") {
    const SpectralGrid grid{-1.0, 1.0, 0.001};
    auto sp = lorentz(0.2, 0.05, grid);
    for (auto& v : sp.values) {
        v = 500.0 - v;
    }
    const auto pk = find_peaks(sp);
    REQUIRE(pk.dips.size() == 1);
    CHECK(std::abs(pk.dips[0].position - 0.2) <= grid.step);
    CHECK(pk.dips[0].height == doctest::Approx(100.0).epsilon(1e-3));
}

TEST_CASE("find_peaks input errors") {
    Spectrum empty;
    CHECK_THROWS_AS(find_peaks(empty), InputError);
    const auto sp = lorentz(0.0, 0.1, {-1.0, 1.0, 0.01});
    CHECK_THROWS_AS(find_peaks(sp, 0.0), InputError);
    CHECK_THROWS_AS(find_peaks(sp, 1.0), InputError);
    auto broken = sp;
    broken.values.pop_back();
    CHECK_THROWS_AS(find_peaks(broken), InputError);
}

TEST_CASE("uncoupled spectrum peaks lie on the resonance ladder") {
    const auto sp = synth_emission(0.0);
    const auto pk = find_peaks(sp);
    REQUIRE(pk.peaks.size() >= 3);
    for (const auto& peak : pk.peaks) {
        const double j = std::round(peak.position + 0.64);
        CHECK(std::abs(peak.position - (j - 0.64)) <= sp.grid.step);
    }
}

TEST_CASE("ZPL inversion examples") {
    PeakSet pk;
    pk.peaks.push_back({-0.672, 1.0, 1.0});
    const auto unique = estimate_force_zpl(pk, baseline(0.0), Interval{0.0, 0.1});
    REQUIRE(unique.candidates.size() == 1);
    CHECK(unique.eta_hat == doctest::Approx(0.02).epsilon(1e-12));
    CHECK_FALSE(unique.ambiguous);
    CHECK(unique.resolvable);
    CHECK(unique.method == InferenceMethod::zpl);
    CHECK(*unique.zpl_position == -0.672);
    CHECK_FALSE(unique.f_hat.has_value());

    const auto triple = fig4_triple();
    REQUIRE(triple.candidates.size() == 3);
    CHECK(triple.candidates[0].eta == doctest::Approx(-0.605));
    CHECK(triple.candidates[1].eta == doctest::Approx(0.02));
    CHECK(triple.candidates[2].eta == doctest::Approx(0.645));
    CHECK(triple.candidates[0].l == -1);
    CHECK(triple.candidates[1].l == 0);
    CHECK(triple.candidates[2].l == 1);
    CHECK(triple.ambiguous);
    CHECK(triple.eta_hat == doctest::Approx(0.02));
    REQUIRE(triple.f_hat.has_value());

    const auto zero = estimate_force_zpl(find_peaks(synth_emission(0.0)), baseline(0.0), Interval{-0.1, 0.1});
    CHECK(std::abs(zero.eta_hat) <= 0.001 / (2.0 * 0.8));
    CHECK_FALSE(zero.resolvable);
}

TEST_CASE("reference peak choice prefers distance, then prominence") {
    PeakSet pk;
    pk.peaks.push_back({-1.672, 5.0, 5.0});
    pk.peaks.push_back({-0.672, 1.0, 1.0});
    pk.peaks.push_back({0.328, 2.0, 2.0});
    const auto est = estimate_force_zpl(pk, baseline(0.0), Interval{0.0, 0.1});
    CHECK(*est.zpl_position == -0.672);
    PeakSet tie;
    tie.peaks.push_back({-0.54, 1.0, 1.0});
    tie.peaks.push_back({-0.74, 1.0, 3.0});
    CHECK(*estimate_force_zpl(tie, baseline(0.0), Interval{-1.0, 1.0}).zpl_position == -0.74);
}

TEST_CASE("ZPL inversion errors") {
    PeakSet none;
    CHECK_THROWS_WITH_AS(estimate_force_zpl(none, baseline(0.0), Interval{0.0, 0.1}), doctest::Contains("no peak"),
                         InferenceError);
    PeakSet pk;
    pk.peaks.push_back({-0.672, 1.0, 1.0});
    CHECK_THROWS_WITH_AS(estimate_force_zpl(pk, baseline(0.0), Interval{0.1, 0.5}),
                         doctest::Contains("empty prior intersection"), InferenceError);
    SystemParams flat = baseline(0.0);
    flat.g0 = 0.0;
    CHECK_THROWS_AS(estimate_force_zpl(pk, flat, Interval{0.0, 0.1}), InferenceError);
    CHECK_THROWS_AS(estimate_force_zpl(pk, baseline(0.0), Interval{0.1, 0.0}), InputError);
}

TEST_CASE("candidate branches follow the miscount arithmetic") {
    oracle::Gen gen(61);
    for (int trial = 0; trial < 50; ++trial) {
        SystemParams p = baseline(0.0);
        p.g0 = gen.real(0.2, 1.5);
        PeakSet pk;
        pk.peaks.push_back({-p.g0 * p.g0 + gen.real(-0.3, 0.3), 1.0, 1.0});
        const Interval prior{gen.real(-3.0, -1.0), gen.real(1.0, 3.0)};
        const auto est = estimate_force_zpl(pk, p, prior, kPhys);
        const double spacing = branch_spacing(p);
        CHECK(spacing == doctest::Approx(1.0 / (2.0 * p.g0)));
        const double f_spacing = kPhys.hbar * kPhys.omega_M_si * kPhys.omega_M_si / (2.0 * p.g0 * kPhys.omega_M_si * kPhys.x0);
        for (std::size_t i = 0; i < est.candidates.size(); ++i) {
            const auto& c = est.candidates[i];
            CHECK(prior.contains(c.eta));
            const double l = c.l - est.candidates.front().l;
            CHECK(c.eta - est.candidates.front().eta == doctest::Approx(l * spacing).epsilon(1e-12));
            const double df = force_from_eta(kPhys, p, c.eta) - force_from_eta(kPhys, p, est.candidates.front().eta);
            CHECK(df == doctest::Approx(l * f_spacing).epsilon(1e-10));
            if (i > 0) {
                CHECK(c.eta > est.candidates[i - 1].eta);
                CHECK(c.l == est.candidates[i - 1].l + 1);
            }
        }
        // every branch inside the prior is listed
        CHECK(est.candidates.front().eta - spacing < prior.lo);
        CHECK(est.candidates.back().eta + spacing > prior.hi);
    }
}

TEST_CASE("emission round trip") {
    const double tol = 0.001 + 0.02 / (4.0 * 0.8);
    for (double eta : {0.015, 0.02, 0.03, 0.04}) {
        CAPTURE(eta);
        const auto measured = synth_emission(eta);
        const auto est = estimate_force_zpl(find_peaks(measured), baseline(0.0), Interval{0.0, 0.1});
        CHECK(std::abs(est.eta_hat - eta) <= tol);
    }
}

TEST_CASE("emission disambiguation on a three-branch candidate set") {
    const ForwardModel model = emission_model(baseline(0.0));
    const auto triple = fig4_triple();
    for (auto [eta, l] : {std::pair{0.02, 0}, std::pair{0.645, 1}, std::pair{-0.605, -1}}) {
        CAPTURE(eta);
        const auto measured = synth_emission(eta);
        const auto est = disambiguate(measured, triple, model, kPhys);
        CHECK(est.eta_hat == doctest::Approx(eta));
        CHECK_FALSE(est.ambiguous);
        for (const auto& c : est.candidates) {
            if (c.l == l) {
                CHECK(c.residual < 1e-6);
            } else {
                CHECK(c.residual > 0.05);
            }
        }
        REQUIRE(est.f_hat.has_value());
        CHECK(*est.f_hat == doctest::Approx(force_from_eta(kPhys, baseline(0.0), eta)));
    }
}

TEST_CASE("the full pipeline picks l = +1 for the upper branch") {
    const auto measured = synth_emission(0.645);
    const auto est = estimate_force_zpl(find_peaks(measured), baseline(0.0), Interval{-0.7, 0.7});
    REQUIRE(est.candidates.size() == 3);
    const auto picked = disambiguate(measured, est, emission_model(baseline(0.0)));
    CHECK(std::abs(picked.eta_hat - 0.645) < 0.002);
    const auto& best = *std::min_element(picked.candidates.begin(), picked.candidates.end(),
                                         [](const Candidate& a, const Candidate& b) { return a.residual < b.residual; });
    CHECK(best.l == 1);
}

TEST_CASE("scattering disambiguation on a three-branch candidate set") {
    ForwardModel model = emission_model(baseline(0.0));
    model.kind = SpectrumKind::scattering_detected;
    model.wavepacket = WavePacket{0.0, 2.0};
    const SpectralGrid grid{-3.0, 1.0, 0.001};
    const auto triple = fig4_triple();
    for (double eta : {0.02, 0.645, -0.605}) {
        CAPTURE(eta);
        Spectrum measured;
        measured.grid = grid;
        measured.values = model.spectrum(eta, grid);
        const auto est = disambiguate(measured, triple, model);
        CHECK(est.eta_hat == doctest::Approx(eta));
    }
}

TEST_CASE("single candidate passes through unchanged") {
    PeakSet pk;
    pk.peaks.push_back({-0.672, 1.0, 1.0});
    const auto est = estimate_force_zpl(pk, baseline(0.0), Interval{0.0, 0.1});
    Spectrum empty;
    const auto out = disambiguate(empty, est, emission_model(baseline(0.0)));
    CHECK(out.eta_hat == est.eta_hat);
    CHECK(out.candidates[0].residual == est.candidates[0].residual);
    ForceEstimate none;
    CHECK_THROWS_AS(disambiguate(empty, none, emission_model(baseline(0.0))), InferenceError);
}

TEST_CASE("tied residuals are reported, not resolved") {
    // Mirror-image candidates +-eta give identical uncoupled spectra.
    SystemParams bare = baseline(0.0);
    bare.g0 = 0.0;
    Silence quiet;
    const auto measured = emission_spectrum(bare, MechanicalState::number(0), SpectralGrid{-1.0, 1.0, 0.001});
    ForceEstimate est;
    est.candidates = {{-1, -0.1, 0.0}, {0, 0.1, 0.0}};
    CHECK_THROWS_WITH_AS(disambiguate(measured, est, emission_model(bare)), doctest::Contains("unresolved"),
                         InferenceError);
}

TEST_CASE("height method below the resolvability threshold") {
    const double eta = 0.005;
    const auto measured = synth_emission(eta);
    const double ref = -0.64 + 0.01;  // flank of the unperturbed zero-phonon line
    const auto est = estimate_force_height(measured, ref, emission_model(baseline(0.0)), Interval{0.0, 0.01}, kPhys);
    CHECK(std::abs(est.eta_hat - eta) < 1e-3);
    CHECK(est.method == InferenceMethod::height);
    CHECK_FALSE(est.resolvable);
    REQUIRE(est.curvature.has_value());
    CHECK(*est.curvature > 0.0);
    CHECK(est.f_hat.has_value());
}

TEST_CASE("height method at zero force") {
    const auto measured = synth_emission(0.0);
    const auto est = estimate_force_height(measured, -0.63, emission_model(baseline(0.0)), Interval{-0.005, 0.01});
    CHECK(std::abs(est.eta_hat) < 1e-4);
}

TEST_CASE("symmetric reference point yields several candidates") {
    // At the unperturbed line center the height is even in eta to first order.
    const auto measured = synth_emission(0.004);
    const auto est = estimate_force_height(measured, -0.64, emission_model(baseline(0.0)), Interval{-0.01, 0.01});
    CHECK(est.candidates.size() >= 2);
    CHECK(est.ambiguous);
    bool negative = false;
    bool positive = false;
    for (const auto& c : est.candidates) {
        negative = negative || c.eta < 0.0;
        positive = positive || c.eta > 0.0;
    }
    CHECK(negative);
    CHECK(positive);
}

TEST_CASE("insensitive model height is a flat objective") {
    SystemParams bare = baseline(0.0);
    bare.g0 = 0.0;
    Silence quiet;
    const auto measured = emission_spectrum(bare, MechanicalState::number(0), SpectralGrid{-1.0, 1.0, 0.001});
    CHECK_THROWS_WITH_AS(estimate_force_height(measured, 0.0, emission_model(bare), Interval{0.0, 0.1}),
                         doctest::Contains("flat"), InferenceError);
    CHECK_THROWS_AS(estimate_force_height(measured, 0.0, emission_model(bare), Interval{0.1, 0.1}), InputError);
}

TEST_CASE("method names") {
    CHECK(inference_method_from_string("zpl") == InferenceMethod::zpl);
    CHECK(inference_method_from_string("height") == InferenceMethod::height);
    CHECK(std::string(to_string(InferenceMethod::height)) == "height");
    CHECK_THROWS_AS(inference_method_from_string("fit"), InputError);
}
