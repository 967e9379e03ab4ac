#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "optoforce/inference.hpp"
#include "optoforce/oracle_dynamics.hpp"
#include "optoforce/spectrum.hpp"

namespace optoforce {

using json = nlohmann::json;

inline constexpr const char* kSpectrumCsvHeader = "delta_over_omegaM,S_times_omegaM";

/// Formats with 12 significant digits ("%.12g").
std::string format_number(double x);
/// Rounds to 12 significant digits so JSON output carries no more precision than the CSVs.
double round12(double x);

void write_spectrum_csv(const Spectrum& sp, std::ostream& os);
/// Writes `csv_path` and, next to it, the metadata document with a .json extension.
void save_spectrum(const Spectrum& sp, const std::filesystem::path& csv_path, const json& extra = json::object());

/// Reads a two-column spectrum CSV. The first column must be a uniform grid.
/// Throws InputError on a missing, empty or malformed file.
Spectrum read_spectrum_csv(std::istream& is);
Spectrum load_spectrum_csv(const std::filesystem::path& path);

json to_json(const SystemParams& p);
json to_json(const PhysicalParams& phys);
json to_json(const SpectralGrid& grid);
json to_json(const WavePacket& wp);
json to_json(const SpectrumMeta& meta);
json to_json(const ForceEstimate& est, const std::optional<PhysicalParams>& phys = std::nullopt,
             const SystemParams* p = nullptr);
json to_json(const OracleReport& report);

/// Serializes with every floating-point value rounded to 12 significant digits.
std::string dump_json(const json& doc);
void write_json(const json& doc, const std::filesystem::path& path);
json read_json(const std::filesystem::path& path);

}  // namespace optoforce
