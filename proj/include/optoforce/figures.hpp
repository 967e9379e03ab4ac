#pragma once

#include <string>
#include <vector>

#include "optoforce/config.hpp"

namespace optoforce {

/// One curve of a published figure: its configuration and which spectrum it plots.
struct FigureCurve {
    std::string name;  // file stem, e.g. "fig3_eta0.02"
    RunConfig config;
    SpectrumKind kind = SpectrumKind::emission;
};

/// Known ids: 2a 2b 2c 3 4 5a 5b 5c 5d 5e 5f 6a 6b.
const std::vector<std::string>& figure_ids();

/// Throws InputError for an unknown id.
std::vector<FigureCurve> figure_curves(const std::string& id);

/// Evaluates the curve on its configured (or default) grid.
Spectrum compute_curve(const FigureCurve& curve);

}  // namespace optoforce
