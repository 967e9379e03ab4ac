#include "optoforce/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "optoforce/errors.hpp"

namespace optoforce {

std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

double round12(double x) {
    if (!std::isfinite(x)) {
        return x;
    }
    return std::strtod(format_number(x).c_str(), nullptr);
}

void write_spectrum_csv(const Spectrum& sp, std::ostream& os) {
    if (sp.values.size() != sp.grid.size()) {
        throw InputError("spectrum values do not match its grid");
    }
    os << kSpectrumCsvHeader << '\n';
    for (std::size_t i = 0; i < sp.values.size(); ++i) {
        os << format_number(sp.grid.at(i)) << ',' << format_number(sp.values[i]) << '\n';
    }
}

void save_spectrum(const Spectrum& sp, const std::filesystem::path& csv_path, const json& extra) {
    std::ofstream os(csv_path);
    if (!os) {
        throw InputError("cannot write " + csv_path.string());
    }
    write_spectrum_csv(sp, os);
    json meta = to_json(sp.meta);
    meta["grid"] = to_json(sp.grid);
    meta["points"] = sp.values.size();
    meta["csv"] = csv_path.filename().string();
    for (const auto& [key, value] : extra.items()) {
        meta[key] = value;
    }
    auto json_path = csv_path;
    json_path.replace_extension(".json");
    write_json(meta, json_path);
}

namespace {

bool parse_double(const std::string& text, double& out) {
    const char* begin = text.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    if (end == begin) {
        return false;
    }
    while (*end == ' ' || *end == '\t' || *end == '\r') {
        ++end;
    }
    return *end == '\0';
}

}  // namespace

Spectrum read_spectrum_csv(std::istream& is) {
    std::vector<double> xs;
    std::vector<double> ys;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        const auto comma = line.find(',');
        double x = 0.0;
        double y = 0.0;
        const bool ok = comma != std::string::npos && parse_double(line.substr(0, comma), x) &&
                        parse_double(line.substr(comma + 1), y);
        if (!ok) {
            if (xs.empty() && line_no == 1) {
                continue;  // header
            }
            throw InputError("malformed spectrum row " + std::to_string(line_no) + ": '" + line + "'");
        }
        if (!std::isfinite(x) || !std::isfinite(y)) {
            throw InputError("non-finite value in spectrum row " + std::to_string(line_no));
        }
        xs.push_back(x);
        ys.push_back(y);
    }
    if (xs.empty()) {
        throw InputError("spectrum file contains no data rows");
    }
    if (xs.size() < 3) {
        throw InputError("spectrum needs at least three samples");
    }
    const double step = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
    if (!(step > 0.0)) {
        throw InputError("spectrum detunings must increase");
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (std::abs(xs[i] - (xs.front() + static_cast<double>(i) * step)) > 1e-6 * step + 1e-10) {
            throw InputError("spectrum detunings are not uniformly spaced (row " + std::to_string(i + 1) + ")");
        }
    }
    Spectrum sp;
    sp.grid = SpectralGrid{xs.front(), xs.back(), step};
    sp.values = std::move(ys);
    if (sp.grid.size() != sp.values.size()) {
        throw InputError("spectrum grid reconstruction failed");
    }
    return sp;
}

Spectrum load_spectrum_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) {
        throw InputError("cannot read spectrum file " + path.string());
    }
    return read_spectrum_csv(is);
}

json to_json(const SystemParams& p) {
    json j{{"omega_M", p.omega_M}, {"g0", p.g0}, {"eta", p.eta}, {"gamma_c", p.gamma_c}, {"gamma_d", p.gamma_d}};
    if (p.omega_c) {
        j["omega_c"] = *p.omega_c;
    }
    const auto dp = derived_params(p);
    j["derived"] = {{"beta0", dp.beta0}, {"beta1", dp.beta1}, {"beta", dp.beta},
                    {"lambda", dp.lambda}, {"zeta", dp.zeta},   {"gamma", dp.gamma}};
    return j;
}

json to_json(const PhysicalParams& phys) {
    return {{"omega_M_si", phys.omega_M_si}, {"x0", phys.x0}, {"hbar", phys.hbar}};
}

json to_json(const SpectralGrid& grid) {
    return {{"delta_min", grid.delta_min}, {"delta_max", grid.delta_max}, {"step", grid.step}};
}

json to_json(const WavePacket& wp) { return {{"delta0", wp.delta0}, {"epsilon", wp.epsilon}}; }

json to_json(const SpectrumMeta& meta) {
    json j{{"kind", to_string(meta.kind)}, {"state", meta.state}, {"phonon_levels", meta.phonon_levels},
           {"warnings", meta.warnings}};
    j["system"] = meta.params ? to_json(*meta.params) : json(nullptr);
    j["wavepacket"] = meta.wavepacket ? to_json(*meta.wavepacket) : json(nullptr);
    return j;
}

json to_json(const ForceEstimate& est, const std::optional<PhysicalParams>& phys, const SystemParams* p) {
    json cands = json::array();
    for (const auto& c : est.candidates) {
        json jc{{"l", c.l}, {"eta", c.eta}, {"residual", c.residual}};
        if (phys && p) {
            jc["f_newtons"] = force_from_eta(*phys, *p, c.eta);
        }
        cands.push_back(jc);
    }
    json j{{"eta_hat", est.eta_hat},     {"candidates", cands},          {"resolvable", est.resolvable},
           {"method", to_string(est.method)}, {"ambiguous", est.ambiguous}};
    j["f_hat_newtons"] = est.f_hat ? json(*est.f_hat) : json(nullptr);
    j["zpl_position"] = est.zpl_position ? json(*est.zpl_position) : json(nullptr);
    j["curvature"] = est.curvature ? json(*est.curvature) : json(nullptr);
    return j;
}

json to_json(const OracleReport& report) {
    const auto& b = report.bath;
    json j;
    j["kind"] = to_string(report.oracle.meta.kind);
    j["system"] = report.oracle.meta.params ? to_json(*report.oracle.meta.params) : json(nullptr);
    j["state"] = report.oracle.meta.state;
    j["wavepacket"] = report.oracle.meta.wavepacket ? to_json(*report.oracle.meta.wavepacket) : json(nullptr);
    j["discretization"] = {{"window", b.window},
                           {"n_modes", b.n_modes},
                           {"spacing", b.spacing},
                           {"recurrence_time", b.recurrence_time()},
                           {"band_correction", b.band_correction},
                           {"phonon_levels", report.levels},
                           {"t_end", report.t_end},
                           {"dt", report.dt},
                           {"steps", report.steps},
                           {"matvecs", report.matvecs}};
    j["relative_l2"] = report.relative_l2;
    j["norm_drift"] = report.norm_drift;
    j["norm_drift_tolerance"] = kNormDriftTol;
    j["initial_norm"] = report.initial_norm;
    j["final_cavity_population"] = report.final_cavity_population;
    j["warnings"] = report.warnings;
    return j;
}

namespace {

void round_in_place(json& j) {
    if (j.is_number_float()) {
        j = round12(j.get<double>());
    } else if (j.is_structured()) {
        for (auto& child : j) {
            round_in_place(child);
        }
    }
}

}  // namespace

std::string dump_json(const json& doc) {
    json copy = doc;
    round_in_place(copy);
    return copy.dump(2);
}

void write_json(const json& doc, const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) {
        throw InputError("cannot write " + path.string());
    }
    os << dump_json(doc) << '\n';
}

json read_json(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) {
        throw InputError("cannot read " + path.string());
    }
    try {
        return json::parse(is);
    } catch (const json::parse_error& e) {
        throw InputError("malformed JSON in " + path.string() + ": " + e.what());
    }
}

}  // namespace optoforce
