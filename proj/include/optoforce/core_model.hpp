#pragma once

#include <optional>

namespace optoforce {

/// Reduced Planck constant in J*s.
inline constexpr double kHbar = 1.054571817e-34;

/// Parameters of the force-loaded optomechanical cavity with two output channels.
///
/// Every frequency is expressed in one common unit, normally the mechanical
/// frequency itself (omega_M = 1). hbar = 1 throughout, so eta is the force
/// coupling f*x0 expressed as a frequency.
struct SystemParams {
    std::optional<double> omega_c;  // absolute cavity frequency, reporting only
    double omega_M = 1.0;
    double g0 = 0.0;
    double eta = 0.0;
    double gamma_c = 0.01;  // detected channel
    double gamma_d = 0.0;   // undetected channel

    bool operator==(const SystemParams&) const = default;
};

struct DerivedParams {
    double beta0;   // zero-photon displacement eta/omega_M
    double beta1;   // one-photon displacement (g0+eta)/omega_M
    double beta;    // beta1 - beta0 = g0/omega_M
    double lambda;  // (g0^2 + 2 g0 eta)/omega_M, difference of the two ground-state shifts
    double zeta;    // eta^2/omega_M, zero-photon ground-state shift
    double gamma;   // total cavity decay rate
};

/// SI conversion data for the mirror.
struct PhysicalParams {
    double omega_M_si;  // rad/s
    double x0;          // zero-point fluctuation, m
    double hbar = kHbar;
};

/// Throws InputError on hard violations; warns when (gamma_c+gamma_d)/omega_M >= 1.
void validate(const SystemParams& p);
void validate(const PhysicalParams& phys);

DerivedParams derived_params(const SystemParams& p);

/// E_{m,j} = m*omega_c + j*omega_M - (g0*m + eta)^2/omega_M. A missing omega_c
/// is taken as zero, i.e. the energy in the frame rotating at the cavity frequency.
double eigen_energy(const SystemParams& p, int m, int j);

/// Detuning at which the |1, n~(1)> -> |0, m~(0)> transition emits.
double resonance_detuning(const SystemParams& p, int n, int m);

/// True iff the force-induced peak shift 2*g0*|eta|/omega_M exceeds the linewidth gamma.
bool resolvability(const SystemParams& p);

/// Smallest force (newtons) whose peak shift exceeds the cavity linewidth.
double min_measurable_force(const PhysicalParams& phys, const SystemParams& p);

/// f = hbar*eta/x0 with eta converted to rad/s.
double force_from_eta(const PhysicalParams& phys, const SystemParams& p, double eta);
double eta_from_force(const PhysicalParams& phys, const SystemParams& p, double force);

/// Effective static model for a force f*cos(omega_f t) read out with a coupling
/// modulated at omega_f: (omega_M - omega_f, g0/2, eta/2), decay rates unchanged.
/// Throws InputError unless 0 < omega_f < omega_M; warns when the rotating-wave
/// condition omega_M + omega_f >> (g0 + eta)/2 holds by less than a factor of 10.
SystemParams periodic_map(const SystemParams& p, double omega_f);

}  // namespace optoforce
