#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "optoforce/core_model.hpp"
#include "optoforce/mech_states.hpp"
#include "optoforce/spectrum.hpp"

namespace optoforce {

struct Peak {
    double position = 0.0;
    double height = 0.0;  // spectrum value at the extremum (dips included)
    double prominence = 0.0;
};

struct PeakSet {
    std::vector<Peak> peaks;
    std::vector<Peak> dips;
};

inline constexpr double kDefaultRelProminence = 0.01;

/// Local maxima and minima whose prominence is at least rel_prominence * max(values).
/// Positions and heights are refined by a parabola through the three samples
/// around each extremum. Throws InputError on an empty spectrum or a
/// rel_prominence outside (0, 1).
PeakSet find_peaks(const Spectrum& sp, double rel_prominence = kDefaultRelProminence);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double center() const { return 0.5 * (lo + hi); }
    bool contains(double x) const { return x >= lo && x <= hi; }
};

enum class InferenceMethod { zpl, height };
const char* to_string(InferenceMethod m);
InferenceMethod inference_method_from_string(const std::string& name);

struct Candidate {
    int l = 0;
    double eta = 0.0;
    double residual = 0.0;
};

struct ForceEstimate {
    double eta_hat = 0.0;
    std::optional<double> f_hat;  // newtons
    std::vector<Candidate> candidates;
    bool resolvable = false;
    InferenceMethod method = InferenceMethod::zpl;
    bool ambiguous = false;             // more than one candidate survives
    std::optional<double> zpl_position;  // folded ZPL detuning used for inversion
    std::optional<double> curvature;     // d^2 residual / d eta^2 at eta_hat (height method)
};

/// Spacing between force branches that map the ZPL onto the same detuning modulo omega_M.
double branch_spacing(const SystemParams& p);

/// Inverts the ZPL position. The reference peak is the detected peak nearest
/// -g0^2/omega_M; every eta_l = eta_0 + l * omega_M^2/(2 g0) inside the prior is
/// a candidate, with eta_0 the branch through that peak. Before disambiguation
/// the residual is |eta_l - prior center| / spacing.
/// Throws InferenceError without a peak, with g0 = 0, or when no branch meets the prior.
ForceEstimate estimate_force_zpl(const PeakSet& pk, const SystemParams& p, const Interval& prior,
                                 const std::optional<PhysicalParams>& phys = std::nullopt);

/// Theoretical spectrum as a function of eta with everything else fixed.
struct ForwardModel {
    SystemParams params;
    MechanicalState state = MechanicalState::number(0);
    SpectrumKind kind = SpectrumKind::emission;
    std::optional<WavePacket> wavepacket;
    bool resonant = false;  // wavepacket center follows -lambda(eta)

    SystemParams at(double eta) const;
    std::vector<double> evaluate(double eta, const std::vector<double>& deltas) const;
    std::vector<double> spectrum(double eta, const SpectralGrid& grid) const;
    double density(double eta, double delta) const;
};

/// Relative L2 threshold under which two candidate residuals count as tied.
inline constexpr double kResidualTieFraction = 0.01;

/// Re-scores every candidate by the relative L2 distance between its forward
/// spectrum and the measurement, and picks the minimizer. A single candidate is
/// returned unchanged. Throws InferenceError when the two best residuals lie
/// within kResidualTieFraction of each other.
ForceEstimate disambiguate(const Spectrum& measured, const ForceEstimate& estimate, const ForwardModel& model,
                           const std::optional<PhysicalParams>& phys = std::nullopt);

/// Relative spread of model heights over the prior below which the height
/// objective counts as flat.
inline constexpr double kFlatObjectiveTol = 1e-6;

/// Height method: minimizes ((S_model(ref; eta) - S_meas(ref)) / S_meas(ref))^2
/// over the prior. The prior is scanned, each local minimum is polished, and all
/// minima within 10% of the best are reported. Throws InferenceError when the
/// model height barely depends on eta or the measured height is not positive.
ForceEstimate estimate_force_height(const Spectrum& measured, double reference_point, const ForwardModel& model,
                                    const Interval& prior, const std::optional<PhysicalParams>& phys = std::nullopt);

}  // namespace optoforce
