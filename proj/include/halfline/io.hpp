#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "halfline/characterize.hpp"
#include "halfline/direct.hpp"
#include "halfline/inverse.hpp"
#include "halfline/types.hpp"

namespace halfline {

using json = nlohmann::ordered_json;

/// Matrices are written as {"re": rows, "im": rows}. Readers also accept a
/// bare number (1x1) or a nested real array.
json matrix_to_json(const Mat& m);
Mat matrix_from_json(const json& j, int n);

json potential_to_json(const Potential& v);
Potential potential_from_json(const json& j);

json boundary_to_json(const BoundaryCondition& bc);
BoundaryCondition boundary_from_json(const json& j);

json scattering_to_json(const ScatteringData& s);
ScatteringData scattering_from_json(const json& j);

/// Applies the "direct" / "inverse" sections of a config document on top of
/// the given defaults. Unknown keys are rejected.
void apply_config(const json& j, DirectConfig& direct, InverseConfig& inverse);
json config_to_json(const DirectConfig& direct, const InverseConfig& inverse);

json recovered_to_json(const RecoveredInput& rec);
json report_to_json(const CharacterizationReport& rep);

/// Parses a JSON file; throws ScatteringError(ParseError) with the file name.
json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& j);

/// k, then Re/Im of every S entry in column-major order.
void write_scattering_csv(const std::filesystem::path& path, const ScatteringData& s);

/// A generic matrix trace: coordinate column, then Re/Im of every entry.
void write_matrix_trace(const std::filesystem::path& path, const std::string& coordinate,
                        std::span<const double> x, std::span<const Mat> values);

}  // namespace halfline
