#include "optoforce/cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>

#include <CLI11.hpp>

#include "optoforce/config.hpp"
#include "optoforce/emission.hpp"
#include "optoforce/errors.hpp"
#include "optoforce/figures.hpp"
#include "optoforce/scattering.hpp"

namespace optoforce {

namespace fs = std::filesystem;

namespace {

class WarningRedirect {
public:
    explicit WarningRedirect(std::ostream& err)
        : previous_(set_warning_handler([&err](std::string_view msg) { err << "warning: " << msg << '\n'; })) {}
    ~WarningRedirect() { set_warning_handler(std::move(previous_)); }
    WarningRedirect(const WarningRedirect&) = delete;
    WarningRedirect& operator=(const WarningRedirect&) = delete;

private:
    WarningHandler previous_;
};

Interval parse_interval(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) {
        throw InputError("--prior expects lo,hi");
    }
    try {
        std::size_t used_lo = 0;
        std::size_t used_hi = 0;
        const std::string lo_text = text.substr(0, comma);
        const std::string hi_text = text.substr(comma + 1);
        Interval iv{std::stod(lo_text, &used_lo), std::stod(hi_text, &used_hi)};
        if (used_lo != lo_text.size() || used_hi != hi_text.size()) {
            throw InputError("--prior expects two numbers lo,hi");
        }
        if (!(iv.lo <= iv.hi)) {
            throw InputError("--prior needs lo <= hi");
        }
        return iv;
    } catch (const std::logic_error&) {
        throw InputError("--prior expects two numbers lo,hi");
    }
}

fs::path with_suffix(const fs::path& stem, const std::string& suffix) {
    return stem.parent_path() / (stem.filename().string() + suffix);
}

fs::path strip_extension(fs::path p) {
    if (p.has_extension()) {
        p.replace_extension();
    }
    return p;
}

void ensure_parent(const fs::path& p) {
    if (p.has_parent_path()) {
        fs::create_directories(p.parent_path());
    }
}

int cmd_emit(const fs::path& config_path, const fs::path& out_path, std::ostream& out) {
    const auto cfg = load_config(config_path);
    const auto p = cfg.effective_system();
    const auto state = cfg.mechanical_state();
    const auto sp = emission_spectrum(p, state, cfg.emission_grid());
    const EmissionModel model(p, state);
    const double total = model.total_probability();
    const double expected = p.gamma_c / (p.gamma_c + p.gamma_d);
    json extra;
    extra["config"] = to_json(cfg);
    extra["checks"] = {{"grid_integral", integrate_spectrum(sp)},
                       {"total_probability", total},
                       {"expected_total", expected},
                       {"total_within_1e-3", std::abs(total - expected) <= 1e-3}};
    ensure_parent(out_path);
    save_spectrum(sp, out_path, extra);
    out << "wrote " << out_path.string() << " (" << sp.values.size() << " points)\n";
    return kExitOk;
}

int cmd_scatter(const fs::path& config_path, const fs::path& out_stem_arg, std::ostream& out) {
    const auto cfg = load_config(config_path);
    const auto p = cfg.effective_system();
    const auto state = cfg.mechanical_state();
    const auto wp = cfg.resolved_wavepacket();
    const auto spectra = scattering_spectra(p, state, wp, cfg.scattering_grid());
    const ScatteringModel model(p, state, wp);
    const auto [detected, undetected] = model.channel_probabilities();

    const auto stem = strip_extension(out_stem_arg);
    ensure_parent(stem);
    const auto det_path = with_suffix(stem, "_detected.csv");
    const auto und_path = with_suffix(stem, "_undetected.csv");
    for (const auto& [sp, path] : {std::pair{&spectra.detected, det_path}, std::pair{&spectra.undetected, und_path}}) {
        std::ofstream os(path);
        if (!os) {
            throw InputError("cannot write " + path.string());
        }
        write_spectrum_csv(*sp, os);
    }
    json meta;
    meta["config"] = to_json(cfg);
    meta["detected"] = to_json(spectra.detected.meta);
    meta["detected"]["csv"] = det_path.filename().string();
    meta["undetected"] = to_json(spectra.undetected.meta);
    meta["undetected"]["csv"] = und_path.filename().string();
    meta["grid"] = to_json(spectra.detected.grid);
    meta["points"] = spectra.detected.values.size();
    const double sum = detected + undetected;
    meta["checks"] = {{"detected_probability", detected},
                      {"undetected_probability", undetected},
                      {"probability_sum", sum},
                      {"unitarity_within_1e-3", std::abs(sum - 1.0) <= 1e-3}};
    const auto json_path = with_suffix(stem, ".json");
    write_json(meta, json_path);
    out << "wrote " << det_path.string() << ", " << und_path.string() << ", " << json_path.string() << '\n';
    return kExitOk;
}

struct InferArgs {
    fs::path spectrum;
    fs::path config;
    std::string mode = "zpl";
    std::string prior;
    std::optional<double> reference;
    std::optional<double> rel_prominence;
    fs::path out;
};

int cmd_infer(const InferArgs& args, std::ostream& out) {
    const auto method = inference_method_from_string(args.mode);
    const auto cfg = load_config(args.config);
    const auto measured = load_spectrum_csv(args.spectrum);
    Interval prior;
    if (!args.prior.empty()) {
        prior = parse_interval(args.prior);
    } else if (cfg.inference.prior) {
        prior = *cfg.inference.prior;
    } else {
        throw InputError("a prior interval is required (--prior lo,hi or inference.prior)");
    }
    const auto model = cfg.forward_model();
    const auto& phys = cfg.physical;

    ForceEstimate est;
    if (method == InferenceMethod::zpl) {
        const auto peaks = find_peaks(measured, args.rel_prominence.value_or(cfg.inference.rel_prominence));
        est = estimate_force_zpl(peaks, model.params, prior, phys);
        est = disambiguate(measured, est, model, phys);
    } else {
        const auto ref = args.reference ? args.reference : cfg.inference.reference_point;
        if (!ref) {
            throw InputError("height mode needs a reference point (--reference or inference.reference_point)");
        }
        est = estimate_force_height(measured, *ref, model, prior, phys);
    }
    auto doc = to_json(est, phys, &model.params);
    doc["spectrum"] = args.spectrum.string();
    doc["prior"] = {prior.lo, prior.hi};
    const auto out_path =
        args.out.empty() ? with_suffix(strip_extension(args.spectrum), "_estimate.json") : args.out;
    ensure_parent(out_path);
    write_json(doc, out_path);
    out << dump_json(doc) << '\n';
    return kExitOk;
}

int cmd_oracle(const fs::path& config_path, const fs::path& out_path, std::ostream& out) {
    const auto cfg = load_config(config_path);
    const auto p = cfg.effective_system();
    const auto state = cfg.mechanical_state();
    const auto report = cfg.wavepacket ? run_scattering_oracle(p, state, cfg.resolved_wavepacket(), cfg.oracle)
                                       : run_emission_oracle(p, state, cfg.oracle);
    auto doc = to_json(report);
    doc["config"] = to_json(cfg);
    ensure_parent(out_path);
    write_json(doc, out_path);
    const auto stem = strip_extension(out_path);
    save_spectrum(report.oracle, with_suffix(stem, "_oracle.csv"));
    save_spectrum(report.analytic, with_suffix(stem, "_analytic.csv"));
    out << "relative_l2 " << format_number(report.relative_l2) << " norm_drift " << format_number(report.norm_drift)
        << " modes " << report.bath.n_modes << " t_end " << format_number(report.t_end) << '\n';
    return kExitOk;
}

int cmd_figure(const std::string& id, const fs::path& outdir, std::ostream& out) {
    const auto curves = figure_curves(id);
    fs::create_directories(outdir);
    for (const auto& curve : curves) {
        const auto sp = compute_curve(curve);
        json extra;
        extra["figure"] = id;
        extra["config"] = to_json(curve.config);
        const auto path = outdir / (curve.name + ".csv");
        save_spectrum(sp, path, extra);
        out << "wrote " << path.string() << '\n';
    }
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    WarningRedirect redirect(err);
    CLI::App app{"Single-photon spectra of a force-loaded optomechanical cavity"};
    app.name("optoforce");
    app.require_subcommand(1);

    fs::path config;
    fs::path output;

    auto* emit = app.add_subcommand("emit", "Emission spectrum to CSV plus metadata JSON");
    emit->add_option("config", config, "Configuration JSON")->required();
    emit->add_option("out", output, "Output CSV path")->required();

    auto* scatter = app.add_subcommand("scatter", "Detected and undetected scattering spectra");
    scatter->add_option("config", config, "Configuration JSON")->required();
    scatter->add_option("out", output, "Output stem (<stem>_detected.csv, <stem>_undetected.csv, <stem>.json)")
        ->required();

    InferArgs infer_args;
    double reference = 0.0;
    double rel_prominence = 0.0;
    auto* infer = app.add_subcommand("infer", "Estimate the force from a measured spectrum");
    infer->add_option("spectrum", infer_args.spectrum, "Spectrum CSV")->required();
    infer->add_option("config", infer_args.config, "Configuration JSON")->required();
    infer->add_option("--mode", infer_args.mode, "zpl or height")->capture_default_str();
    infer->add_option("--prior", infer_args.prior, "Admissible eta interval lo,hi");
    auto* ref_opt = infer->add_option("--reference", reference, "Reference detuning for the height method");
    auto* prom_opt = infer->add_option("--rel-prominence", rel_prominence, "Relative peak prominence threshold");
    infer->add_option("--out", infer_args.out, "Estimate JSON path");

    auto* oracle = app.add_subcommand("oracle", "Brute-force dynamical cross-check");
    oracle->add_option("config", config, "Configuration JSON")->required();
    oracle->add_option("out", output, "Report JSON path")->required();

    std::string figure_id;
    auto* figure = app.add_subcommand("figure", "Write the curves of a published figure");
    figure->add_option("--id", figure_id, "Figure id")->required();
    figure->add_option("outdir", output, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*emit) {
            return cmd_emit(config, output, out);
        }
        if (*scatter) {
            return cmd_scatter(config, output, out);
        }
        if (*infer) {
            if (*ref_opt) {
                infer_args.reference = reference;
            }
            if (*prom_opt) {
                infer_args.rel_prominence = rel_prominence;
            }
            return cmd_infer(infer_args, out);
        }
        if (*oracle) {
            return cmd_oracle(config, output, out);
        }
        return cmd_figure(figure_id, output, out);
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const TruncationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const InferenceError& e) {
        err << "inference failed: " << e.what() << '\n';
        return kExitInference;
    } catch (const OracleRefusal& e) {
        err << "oracle refused: " << e.what() << '\n';
        return kExitOracleRefusal;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << '\n';
        return kExitFailure;
    }
}

}  // namespace optoforce
