#pragma once

#include <filesystem>
#include <optional>

#include "optoforce/inference.hpp"
#include "optoforce/io.hpp"
#include "optoforce/mech_states.hpp"
#include "optoforce/oracle_dynamics.hpp"

namespace optoforce {

struct StateSpec {
    StateKind kind = StateKind::number;
    double value = 0.0;

    MechanicalState build() const;
};

/// Wavepacket as configured; a missing center means "resonant" (delta0 = -lambda).
struct WavePacketSpec {
    std::optional<double> delta0;
    double epsilon = 1.0;

    bool resonant() const { return !delta0.has_value(); }
    WavePacket resolve(const SystemParams& p) const;
};

struct InferenceSpec {
    std::optional<Interval> prior;
    std::optional<double> reference_point;
    double rel_prominence = kDefaultRelProminence;
    std::optional<SpectrumKind> forward;
};

/// Parsed configuration document. Top-level keys: system (required), physical,
/// state, wavepacket, grid, oracle, periodic_force, inference. Unknown keys at
/// any level are rejected.
struct RunConfig {
    SystemParams system;
    std::optional<PhysicalParams> physical;
    StateSpec state;
    std::optional<WavePacketSpec> wavepacket;
    std::optional<SpectralGrid> grid;
    OracleSettings oracle;
    std::optional<double> periodic_omega_f;
    InferenceSpec inference;

    /// System parameters after the periodic-force mapping, if one is configured.
    SystemParams effective_system() const;
    MechanicalState mechanical_state() const { return state.build(); }
    /// Configured wavepacket resolved against effective_system(); throws InputError when absent.
    WavePacket resolved_wavepacket() const;
    SpectralGrid emission_grid() const;
    SpectralGrid scattering_grid() const;
    /// Forward model for inference, eta left to the caller.
    ForwardModel forward_model() const;
};

RunConfig parse_config(const json& doc);
RunConfig load_config(const std::filesystem::path& path);
/// Canonical snapshot, re-parseable by parse_config.
json to_json(const RunConfig& cfg);

}  // namespace optoforce
