// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "optoforce/config.hpp"
#include "optoforce/emission.hpp"
#include "optoforce/errors.hpp"
#include "optoforce/franck_condon.hpp"
#include "optoforce/inference.hpp"
#include "optoforce/oracle_dynamics.hpp"
#include "optoforce/scattering.hpp"
#include "oracles.hpp"

using namespace optoforce;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
        }
    }
    void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

SystemParams baseline(double eta) {
    SystemParams p;
    p.omega_M = 1.0;
    p.g0 = 0.8;
    p.eta = eta;
    p.gamma_c = 0.01;
    p.gamma_d = 0.01;
    return p;
}

const PhysicalParams kPhys{2.0 * std::numbers::pi * 1e8, 0.4e-14};

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<void(Outcome&)>& body) {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(out);
    } catch (const std::exception& e) {
        out.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (budget_s > 0.0) {
        out.require(secs < budget_s, "runtime " + fmt("%.3g", secs) + " s over budget " + fmt("%g", budget_s) + " s");
    }
    failures += out.pass ? 0 : 1;
    std::printf("C%-2d %s  %s  [%.3f s] %s\n", id, out.pass ? "PASS" : "FAIL", title, secs, out.detail.c_str());
    std::fflush(stdout);
}

double zpl_of(const PeakSet& pk, double lambda) {
    double best = pk.peaks.front().position;
    for (const auto& p : pk.peaks) {
        if (std::abs(p.position + lambda) < std::abs(best + lambda)) {
            best = p.position;
        }
    }
    return best;
}

bool on_ladder(double x, double lambda, double omega_M, double tol) {
    const double j = std::round((x + lambda) / omega_M);
    return std::abs(x - (j * omega_M - lambda)) <= tol;
}

}  // namespace

int main() {
    set_warning_handler({});

    criterion(1, "minimum measurable force", 0.0, [](Outcome& o) {
        SystemParams p;
        p.g0 = 1.0;
        p.gamma_c = 0.005;
        p.gamma_d = 0.005;
        const auto t0 = std::chrono::steady_clock::now();
        const double f = min_measurable_force(kPhys, p);
        const double us = std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0).count();
        const double rel = std::abs(f - 8.25e-14) / 8.25e-14;
        o.note("f = " + fmt("%.4g", f) + " N, rel err " + fmt("%.3g", rel) + ", call " + fmt("%.3g", us) + " us");
        o.require(rel < 0.01, "within 1% of 8.25e-14 N");
        o.require(us < 1000.0, "runtime < 1 ms");
    });

    criterion(2, "emission peak positions and force shifts", 5.0, [](Outcome& o) {
        std::vector<double> zpl;
        double worst = 0.0;
        for (double eta : {0.0, 0.01, 0.02, 0.04}) {
            const auto p = baseline(eta);
            const double lambda = derived_params(p).lambda;
            const auto grid = default_emission_grid(p);
            const auto sp = emission_spectrum(p, MechanicalState::number(0), grid);
            const auto pk = find_peaks(sp);
            o.require(pk.peaks.size() >= 3, "at least three peaks at eta " + fmt("%g", eta));
            for (const auto& peak : pk.peaks) {
                const double j = std::round(peak.position + lambda);
                worst = std::max(worst, std::abs(peak.position - (j - lambda)) / grid.step);
            }
            zpl.push_back(zpl_of(pk, lambda));
        }
        o.require(worst <= 1.0, "peak offsets within one grid step");
        const double expected[] = {0.016, 0.032, 0.064};
        double worst_shift = 0.0;
        for (int i = 0; i < 3; ++i) {
            worst_shift = std::max(worst_shift, std::abs((zpl[0] - zpl[i + 1]) - expected[i]) / 0.001);
        }
        o.require(worst_shift <= 1.0, "shifts within one grid step");
        o.note("max peak offset " + fmt("%.3g", worst) + " steps, max shift error " + fmt("%.3g", worst_shift) +
               " steps");
    });

    criterion(3, "resolvability gate", 0.0, [](Outcome& o) {
        o.require(!resolvability(baseline(0.01)), "eta 0.01 unresolvable");
        o.require(resolvability(baseline(0.02)), "eta 0.02 resolvable");
        o.require(resolvability(baseline(0.04)), "eta 0.04 resolvable");
        const double threshold = (0.02) / (2.0 * 0.8);
        o.note("threshold " + fmt("%.4g", threshold));
        o.require(std::abs(threshold - 0.0125) < 1e-15, "threshold 0.0125");
    });

    criterion(4, "emission normalization", 5.0, [](Outcome& o) {
        SystemParams uneven = baseline(0.02);
        uneven.gamma_c = 0.015;
        uneven.gamma_d = 0.005;
        SystemParams other = baseline(-0.05);
        other.g0 = 0.5;
        other.gamma_c = 0.02;
        other.gamma_d = 0.01;
        const std::vector<std::pair<SystemParams, MechanicalState>> sets{
            {baseline(0.02), MechanicalState::number(0)},
            {uneven, MechanicalState::coherent(1.0)},
            {other, MechanicalState::thermal(0.5)}};
        for (const auto& [p, state] : sets) {
            const double gamma = p.gamma_c + p.gamma_d;
            const auto sp = emission_spectrum(p, state, SpectralGrid{-20.0, 20.0, gamma / 20.0});
            const double integral = integrate_spectrum(sp);
            const double expected = p.gamma_c / gamma;
            o.note(state.describe() + ": " + fmt("%.6f", integral) + " vs " + fmt("%.4g", expected));
            o.require(std::abs(integral - expected) <= 1e-3, "integral within 1e-3");
        }
    });

    criterion(5, "scattering unitarity, resonant main peak, interference dip", 10.0, [](Outcome& o) {
        const auto p = baseline(0.02);
        const double lambda = derived_params(p).lambda;
        const double total_a = total_scattering_probability(p, MechanicalState::number(0), WavePacket{0.0, 2.0});
        const auto narrow = resonant_wavepacket(p, 0.01);
        const double total_d = total_scattering_probability(p, MechanicalState::number(0), narrow);
        o.note("P(wide) " + fmt("%.7f", total_a) + ", P(narrow) " + fmt("%.7f", total_d));
        o.require(std::abs(total_a - 1.0) <= 1e-3, "wide-packet unitarity");
        o.require(std::abs(total_d - 1.0) <= 1e-3, "narrow-packet unitarity");

        // The resonant main lobe is split by the interference dip; its position is
        // the midpoint of its two dominant maxima.
        const auto grid = default_scattering_grid(p, narrow);
        const auto sp = scattering_spectrum(p, MechanicalState::number(0), narrow, grid);
        auto peaks = find_peaks(sp).peaks;
        std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.height > b.height; });
        o.require(peaks.size() >= 2, "two dominant maxima");
        if (peaks.size() >= 2) {
            const double center = 0.5 * (peaks[0].position + peaks[1].position);
            o.note("main lobe center offset " + fmt("%.3g", (center + lambda) / grid.step) + " steps");
            o.require(std::abs(center + lambda) <= grid.step, "main peak at -lambda");
        }

        for (double eta : {0.0, 0.01, 0.02, 0.04}) {
            const auto q = baseline(eta);
            const double lam = derived_params(q).lambda;
            const auto wp = resonant_wavepacket(q, 0.01);
            const auto s = scattering_spectrum(q, MechanicalState::number(0), wp, default_scattering_grid(q, wp));
            const auto pk = find_peaks(s);
            bool found = false;
            for (const auto& dip : pk.dips) {
                if (std::abs(dip.position + lam) > 3.0 * wp.epsilon) {
                    continue;
                }
                bool left = false;
                bool right = false;
                for (const auto& peak : pk.peaks) {
                    if (std::abs(peak.position + lam) <= 3.0 * wp.epsilon) {
                        left = left || peak.position < dip.position;
                        right = right || peak.position > dip.position;
                    }
                }
                found = found || (left && right);
            }
            o.require(found, "dip at eta " + fmt("%g", eta));
        }
    });

    criterion(6, "oracle equivalence", 300.0, [](Outcome& o) {
        const auto a = run_emission_oracle(baseline(0.02), MechanicalState::number(0));
        o.note("(a) L2 " + fmt("%.3g", a.relative_l2) + " drift " + fmt("%.2g", a.norm_drift));
        o.require(a.relative_l2 < 0.02 && a.norm_drift < 1e-6, "(a) baseline emission");

        SystemParams bare = baseline(0.0);
        bare.g0 = 0.0;
        const WavePacket wp{0.3, 0.05};
        const auto b = run_scattering_oracle(bare, MechanicalState::number(0), wp);
        std::vector<double> closed(b.oracle.values.size());
        for (std::size_t k = 0; k < closed.size(); ++k) {
            closed[k] = oracle::bare_scattering(b.bath.detuning(static_cast<int>(k)), wp.delta0, wp.epsilon,
                                                bare.gamma_c, bare.gamma_d)
                            .first;
        }
        const double lb = relative_l2(b.oracle.values, closed);
        o.note("(b) L2 " + fmt("%.3g", lb) + " drift " + fmt("%.2g", b.norm_drift));
        o.require(lb < 0.02 && b.norm_drift < 1e-6, "(b) closed-form scattering");

        const auto p = baseline(0.02);
        const auto c = run_scattering_oracle(p, MechanicalState::number(0), resonant_wavepacket(p, 0.01));
        o.note("(c) L2 " + fmt("%.3g", c.relative_l2) + " drift " + fmt("%.2g", c.norm_drift));
        o.require(c.relative_l2 < 0.02 && c.norm_drift < 1e-6, "(c) resonant narrow-packet scattering");
    });

    criterion(7, "Franck-Condon correctness", 0.0, [](Outcome& o) {
        double worst_ortho = 0.0;
        double worst_complete = 0.0;
        double worst_expm = 0.0;
        for (double d : {0.8, -0.82, 0.02}) {
            for (const auto& state :
                 {MechanicalState::number(0), MechanicalState::coherent(1.0), MechanicalState::thermal(1.0)}) {
                const int N = adaptive_truncation(d, state, kProjectionTol);
                const int wide = N + 40;
                const auto t = fc_table(d, wide);
                for (int m = 0; m < N; ++m) {
                    for (int k = 0; k < N; ++k) {
                        double dot = 0.0;
                        for (int n = 0; n < wide; ++n) {
                            dot += t(m, n) * t(k, n);
                        }
                        worst_ortho = std::max(worst_ortho, std::abs(dot - (m == k ? 1.0 : 0.0)));
                    }
                }
                for (const auto& comp : state.components()) {
                    double kept = 0.0;
                    double total = 0.0;
                    for (double c : comp.coeffs) {
                        total += c * c;
                    }
                    for (int j = 0; j < N; ++j) {
                        double c = 0.0;
                        for (std::size_t i = 0; i < comp.coeffs.size(); ++i) {
                            c += t(j, static_cast<int>(i)) * comp.coeffs[i];
                        }
                        kept += c * c;
                    }
                    worst_complete = std::max(worst_complete, comp.weight * (total - kept) / total);
                }
            }
            const int N = 60;
            const auto ref = oracle::displacement_expm(d, N + 20);
            const auto t = fc_table(d, N);
            for (int m = 0; m < N - 10; ++m) {
                for (int n = 0; n < N - 10; ++n) {
                    worst_expm = std::max(worst_expm, std::abs(t(m, n) - ref(m, n)));
                }
            }
        }
        o.note("orthonormality " + fmt("%.2g", worst_ortho) + ", completeness deficit " + fmt("%.2g", worst_complete) +
               ", expm " + fmt("%.2g", worst_expm));
        o.require(worst_ortho <= 1e-8, "orthonormality");
        o.require(worst_complete <= 1e-8, "completeness");
        o.require(worst_expm <= 1e-8, "matrix exponential agreement");
    });

    criterion(8, "inference round trip and disambiguation", 0.0, [](Outcome& o) {
        const double tol = 0.001 + 0.02 / (4.0 * 0.8);
        double worst = 0.0;
        for (double eta : {0.015, 0.02, 0.03, 0.04}) {
            const auto sp = emission_spectrum(baseline(eta), MechanicalState::number(0), SpectralGrid{-4.0, 2.0, 0.001});
            const auto est = estimate_force_zpl(find_peaks(sp), baseline(0.0), Interval{0.0, 0.1});
            worst = std::max(worst, std::abs(est.eta_hat - eta));
        }
        o.note("round-trip error " + fmt("%.3g", worst) + " (tol " + fmt("%.3g", tol) + ")");
        o.require(worst <= tol, "round trip");

        PeakSet pk;
        pk.peaks.push_back({-0.672, 1.0, 1.0});
        const auto triple = estimate_force_zpl(pk, baseline(0.0), Interval{-0.7, 0.7}, kPhys);
        o.require(triple.candidates.size() == 3, "three candidates");

        ForwardModel emission;
        emission.params = baseline(0.0);
        ForwardModel scattering = emission;
        scattering.kind = SpectrumKind::scattering_detected;
        scattering.wavepacket = WavePacket{0.0, 2.0};
        const SpectralGrid grid{-3.0, 1.0, 0.001};
        for (const auto* model : {&emission, &scattering}) {
            for (double eta : {0.02, 0.645, -0.605}) {
                Spectrum measured;
                measured.grid = grid;
                measured.values = model->spectrum(eta, grid);
                const auto est = disambiguate(measured, triple, *model);
                o.require(std::abs(est.eta_hat - eta) < 1e-9,
                          std::string(to_string(model->kind)) + " branch at eta " + fmt("%g", eta));
            }
        }

        const double expected = kPhys.hbar * kPhys.omega_M_si * kPhys.omega_M_si / (2.0 * 0.8 * kPhys.omega_M_si * kPhys.x0);
        double worst_spacing = 0.0;
        for (std::size_t i = 1; i < triple.candidates.size(); ++i) {
            const double df = force_from_eta(kPhys, baseline(0.0), triple.candidates[i].eta) -
                              force_from_eta(kPhys, baseline(0.0), triple.candidates[i - 1].eta);
            worst_spacing = std::max(worst_spacing, std::abs(df - expected) / expected);
        }
        o.note("force spacing " + fmt("%.6g", expected) + " N, rel dev " + fmt("%.2g", worst_spacing));
        o.require(worst_spacing < 1e-12, "force spacing hbar wM^2/(2 g0 x0)");
    });

    criterion(9, "periodic mapping bit-for-bit", 0.0, [](Outcome& o) {
        RunConfig cfg;
        cfg.system.g0 = 0.1;
        cfg.system.eta = 0.02;
        cfg.system.gamma_c = 0.01;
        cfg.system.gamma_d = 0.01;
        cfg.periodic_omega_f = 0.3;
        SystemParams primed = cfg.system;
        primed.omega_M = cfg.system.omega_M - 0.3;
        primed.g0 = cfg.system.g0 / 2.0;
        primed.eta = cfg.system.eta / 2.0;
        const SpectralGrid grid{-2.0, 1.0, 0.001};
        const auto state = MechanicalState::coherent(1.0);
        const auto mapped = emission_spectrum(cfg.effective_system(), state, grid);
        const auto direct = emission_spectrum(primed, state, grid);
        o.require(mapped.values.size() == direct.values.size() &&
                      std::memcmp(mapped.values.data(), direct.values.data(), mapped.values.size() * sizeof(double)) == 0,
                  "emission identical");
        const WavePacket wp{-0.1, 0.05};
        const auto ms = scattering_spectra(cfg.effective_system(), state, wp, grid);
        const auto ds = scattering_spectra(primed, state, wp, grid);
        o.require(std::memcmp(ms.detected.values.data(), ds.detected.values.data(),
                              ms.detected.values.size() * sizeof(double)) == 0 &&
                      std::memcmp(ms.undetected.values.data(), ds.undetected.values.data(),
                                  ms.undetected.values.size() * sizeof(double)) == 0,
                  "scattering identical");
        o.note(std::to_string(mapped.values.size()) + " emission and " + std::to_string(2 * ms.detected.values.size()) +
               " scattering samples compared");
    });

    criterion(10, "initial-state independence of peak positions", 0.0, [](Outcome& o) {
        const auto p = baseline(0.02);
        const double lambda = derived_params(p).lambda;
        const auto grid = default_emission_grid(p);
        const auto ground = find_peaks(emission_spectrum(p, MechanicalState::number(0), grid)).peaks;
        double max_diff = 0.0;
        int matched = 0;
        for (const auto& state : {MechanicalState::coherent(1.0), MechanicalState::thermal(1.0)}) {
            const auto other = find_peaks(emission_spectrum(p, state, grid)).peaks;
            for (const auto& q : other) {
                o.require(on_ladder(q.position, lambda, p.omega_M, grid.step),
                          state.describe() + " peak on the common ladder");
            }
            // A sideband can carry negligible weight for one state, so only rungs
            // detected in both spectra are compared.
            int shared = 0;
            for (const auto& g : ground) {
                for (const auto& q : other) {
                    if (std::abs(q.position - g.position) > 0.5 * p.omega_M) {
                        continue;
                    }
                    ++shared;
                    o.require(std::abs(q.position - g.position) <= grid.step,
                              state.describe() + " match for ground peak at " + fmt("%.4f", g.position));
                    max_diff = std::max(max_diff, std::abs(q.height - g.height) / g.height);
                }
            }
            o.require(shared >= 3, state.describe() + " shares at least three peaks");
            matched += shared;
        }
        o.note(std::to_string(matched) + " matched pairs, max height difference " + fmt("%.1f", 100.0 * max_diff) + "%");
        o.require(max_diff > 0.05, "some matched pair differs by more than 5%");
    });

    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
