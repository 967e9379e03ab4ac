#include "optoforce/config.hpp"

#include <cmath>
#include <initializer_list>
#include <string_view>

#include "optoforce/errors.hpp"
#include "optoforce/scattering.hpp"

namespace optoforce {

namespace {

void require_object(const json& j, std::string_view ctx) {
    if (!j.is_object()) {
        throw InputError(std::string(ctx) + " must be a JSON object");
    }
}

void check_keys(const json& j, std::initializer_list<std::string_view> allowed, std::string_view ctx) {
    require_object(j, ctx);
    for (const auto& [key, _] : j.items()) {
        bool known = false;
        for (auto a : allowed) {
            known = known || key == a;
        }
        if (!known) {
            throw InputError("unknown key '" + key + "' in " + std::string(ctx));
        }
    }
}

double number(const json& j, const char* key, std::string_view ctx) {
    const auto it = j.find(key);
    if (it == j.end()) {
        throw InputError(std::string(ctx) + "." + key + " is required");
    }
    if (!it->is_number()) {
        throw InputError(std::string(ctx) + "." + key + " must be a number");
    }
    const double v = it->get<double>();
    if (!std::isfinite(v)) {
        throw InputError(std::string(ctx) + "." + key + " must be finite");
    }
    return v;
}

std::optional<double> optional_number(const json& j, const char* key, std::string_view ctx) {
    if (!j.contains(key)) {
        return std::nullopt;
    }
    return number(j, key, ctx);
}

SystemParams parse_system(const json& j) {
    check_keys(j, {"omega_c", "omega_M", "g0", "eta", "gamma_c", "gamma_d"}, "system");
    SystemParams p;
    p.omega_c = optional_number(j, "omega_c", "system");
    p.omega_M = optional_number(j, "omega_M", "system").value_or(p.omega_M);
    p.g0 = number(j, "g0", "system");
    p.eta = optional_number(j, "eta", "system").value_or(0.0);
    p.gamma_c = number(j, "gamma_c", "system");
    p.gamma_d = optional_number(j, "gamma_d", "system").value_or(0.0);
    validate(p);
    return p;
}

PhysicalParams parse_physical(const json& j) {
    check_keys(j, {"omega_M_si", "x0", "hbar"}, "physical");
    PhysicalParams phys{number(j, "omega_M_si", "physical"), number(j, "x0", "physical")};
    phys.hbar = optional_number(j, "hbar", "physical").value_or(kHbar);
    validate(phys);
    return phys;
}

StateSpec parse_state(const json& j) {
    check_keys(j, {"kind", "value"}, "state");
    const auto kind = j.find("kind");
    if (kind == j.end() || !kind->is_string()) {
        throw InputError("state.kind must be one of number, coherent, thermal");
    }
    StateSpec s;
    s.kind = state_kind_from_string(kind->get<std::string>());
    s.value = number(j, "value", "state");
    s.build();  // validates the value
    return s;
}

WavePacketSpec parse_wavepacket(const json& j) {
    check_keys(j, {"delta0", "epsilon"}, "wavepacket");
    WavePacketSpec w;
    w.epsilon = number(j, "epsilon", "wavepacket");
    const auto d0 = j.find("delta0");
    if (d0 == j.end()) {
        throw InputError("wavepacket.delta0 is required (a number or \"resonant\")");
    }
    if (d0->is_string()) {
        if (d0->get<std::string>() != "resonant") {
            throw InputError("wavepacket.delta0 must be a number or \"resonant\"");
        }
    } else {
        w.delta0 = number(j, "delta0", "wavepacket");
    }
    validate(WavePacket{w.delta0.value_or(0.0), w.epsilon});
    return w;
}

SpectralGrid parse_grid(const json& j) {
    check_keys(j, {"delta_min", "delta_max", "step"}, "grid");
    SpectralGrid g{number(j, "delta_min", "grid"), number(j, "delta_max", "grid"), number(j, "step", "grid")};
    if (!(g.delta_min < g.delta_max) || !(g.step > 0.0)) {
        throw InputError("grid needs delta_min < delta_max and step > 0");
    }
    return g;
}

OracleSettings parse_oracle(const json& j) {
    check_keys(j, {"window", "n_modes", "t_end", "dt", "band_correction"}, "oracle");
    OracleSettings s;
    s.window = optional_number(j, "window", "oracle");
    s.t_end = optional_number(j, "t_end", "oracle");
    s.dt = optional_number(j, "dt", "oracle");
    if (j.contains("n_modes")) {
        const auto& n = j["n_modes"];
        if (!n.is_number_integer() || n.get<long long>() < 2) {
            throw InputError("oracle.n_modes must be an integer >= 2");
        }
        s.n_modes = n.get<int>();
    }
    if (j.contains("band_correction")) {
        if (!j["band_correction"].is_boolean()) {
            throw InputError("oracle.band_correction must be a boolean");
        }
        s.band_correction = j["band_correction"].get<bool>();
    }
    return s;
}

InferenceSpec parse_inference(const json& j) {
    check_keys(j, {"prior", "reference_point", "rel_prominence", "forward"}, "inference");
    InferenceSpec s;
    if (j.contains("prior")) {
        const auto& pr = j["prior"];
        if (!pr.is_array() || pr.size() != 2 || !pr[0].is_number() || !pr[1].is_number()) {
            throw InputError("inference.prior must be [lo, hi]");
        }
        s.prior = Interval{pr[0].get<double>(), pr[1].get<double>()};
        if (!(s.prior->lo <= s.prior->hi)) {
            throw InputError("inference.prior must satisfy lo <= hi");
        }
    }
    s.reference_point = optional_number(j, "reference_point", "inference");
    s.rel_prominence = optional_number(j, "rel_prominence", "inference").value_or(kDefaultRelProminence);
    if (j.contains("forward")) {
        if (!j["forward"].is_string()) {
            throw InputError("inference.forward must be a spectrum kind string");
        }
        s.forward = spectrum_kind_from_string(j["forward"].get<std::string>());
    }
    return s;
}

}  // namespace

MechanicalState StateSpec::build() const {
    switch (kind) {
        case StateKind::number:
            if (value < 0.0 || value != std::floor(value)) {
                throw InputError("number state needs a non-negative integer value");
            }
            return MechanicalState::number(static_cast<int>(value));
        case StateKind::coherent:
            return MechanicalState::coherent(value);
        case StateKind::thermal:
            return MechanicalState::thermal(value);
    }
    throw InputError("unknown state kind");
}

WavePacket WavePacketSpec::resolve(const SystemParams& p) const {
    if (resonant()) {
        return resonant_wavepacket(p, epsilon);
    }
    return WavePacket{*delta0, epsilon};
}

SystemParams RunConfig::effective_system() const {
    if (!periodic_omega_f) {
        return system;
    }
    // parse_config already reported any rotating-wave warning; stay quiet on repeats.
    auto previous = set_warning_handler({});
    try {
        auto mapped = periodic_map(system, *periodic_omega_f);
        set_warning_handler(std::move(previous));
        return mapped;
    } catch (...) {
        set_warning_handler(std::move(previous));
        throw;
    }
}

WavePacket RunConfig::resolved_wavepacket() const {
    if (!wavepacket) {
        throw InputError("scattering commands require a wavepacket block");
    }
    return wavepacket->resolve(effective_system());
}

SpectralGrid RunConfig::emission_grid() const { return grid.value_or(default_emission_grid(effective_system())); }

SpectralGrid RunConfig::scattering_grid() const {
    if (grid) {
        return *grid;
    }
    return default_scattering_grid(effective_system(), resolved_wavepacket());
}

ForwardModel RunConfig::forward_model() const {
    ForwardModel fm;
    fm.params = effective_system();
    fm.state = mechanical_state();
    fm.kind = inference.forward.value_or(wavepacket ? SpectrumKind::scattering_detected : SpectrumKind::emission);
    if (fm.kind != SpectrumKind::emission) {
        const auto wp = resolved_wavepacket();
        fm.wavepacket = wp;
        fm.resonant = wavepacket->resonant();
    }
    return fm;
}

RunConfig parse_config(const json& doc) {
    check_keys(doc, {"system", "physical", "state", "wavepacket", "grid", "oracle", "periodic_force", "inference"},
               "config");
    if (!doc.contains("system")) {
        throw InputError("config.system is required");
    }
    RunConfig cfg;
    cfg.system = parse_system(doc["system"]);
    if (doc.contains("physical")) {
        cfg.physical = parse_physical(doc["physical"]);
    }
    if (doc.contains("state")) {
        cfg.state = parse_state(doc["state"]);
    }
    if (doc.contains("wavepacket")) {
        cfg.wavepacket = parse_wavepacket(doc["wavepacket"]);
    }
    if (doc.contains("grid")) {
        cfg.grid = parse_grid(doc["grid"]);
    }
    if (doc.contains("oracle")) {
        cfg.oracle = parse_oracle(doc["oracle"]);
    }
    if (doc.contains("periodic_force")) {
        const auto& pf = doc["periodic_force"];
        check_keys(pf, {"omega_f"}, "periodic_force");
        cfg.periodic_omega_f = number(pf, "omega_f", "periodic_force");
        periodic_map(cfg.system, *cfg.periodic_omega_f);  // validates omega_f
    }
    if (doc.contains("inference")) {
        cfg.inference = parse_inference(doc["inference"]);
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) { return parse_config(read_json(path)); }

json to_json(const RunConfig& cfg) {
    json j;
    auto sys = to_json(cfg.system);
    sys.erase("derived");
    j["system"] = sys;
    if (cfg.physical) {
        j["physical"] = to_json(*cfg.physical);
    }
    j["state"] = {{"kind", to_string(cfg.state.kind)}, {"value", cfg.state.value}};
    if (cfg.wavepacket) {
        j["wavepacket"] = {{"epsilon", cfg.wavepacket->epsilon}};
        j["wavepacket"]["delta0"] = cfg.wavepacket->delta0 ? json(*cfg.wavepacket->delta0) : json("resonant");
    }
    if (cfg.grid) {
        j["grid"] = to_json(*cfg.grid);
    }
    json oracle = json::object();
    if (cfg.oracle.window) oracle["window"] = *cfg.oracle.window;
    if (cfg.oracle.n_modes) oracle["n_modes"] = *cfg.oracle.n_modes;
    if (cfg.oracle.t_end) oracle["t_end"] = *cfg.oracle.t_end;
    if (cfg.oracle.dt) oracle["dt"] = *cfg.oracle.dt;
    if (cfg.oracle.band_correction) oracle["band_correction"] = *cfg.oracle.band_correction;
    if (!oracle.empty()) {
        j["oracle"] = oracle;
    }
    if (cfg.periodic_omega_f) {
        j["periodic_force"] = {{"omega_f", *cfg.periodic_omega_f}};
    }
    json inf = json::object();
    if (cfg.inference.prior) inf["prior"] = {cfg.inference.prior->lo, cfg.inference.prior->hi};
    if (cfg.inference.reference_point) inf["reference_point"] = *cfg.inference.reference_point;
    if (cfg.inference.rel_prominence != kDefaultRelProminence) inf["rel_prominence"] = cfg.inference.rel_prominence;
    if (cfg.inference.forward) inf["forward"] = to_string(*cfg.inference.forward);
    if (!inf.empty()) {
        j["inference"] = inf;
    }
    return j;
}

}  // namespace optoforce
