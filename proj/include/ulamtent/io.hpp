#pragma once

/// @file io.hpp
/// @brief File formats: density/sweep/pair CSVs, report JSON, map
/// definitions, and the SVG density heatmap.
///
/// Numbers are written with 17 significant digits through std::to_chars, so
/// output is locale-independent and round-trips exactly.

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "ulamtent/analysis.hpp"
#include "ulamtent/bv.hpp"
#include "ulamtent/maps.hpp"
#include "ulamtent/ulam.hpp"

namespace ulamtent::io {

/// Shortest-safe decimal text of v with 17 significant digits.
std::string format_double(double v);

/// Writes content to a temporary sibling and renames it over path.
/// Throws std::runtime_error when the file cannot be written.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// cell_id,cx,cy,area,rho
std::string density_csv(const DensityVector& rho, const UlamPartition& part);

/// {"t": ..., "rows": [[[col, weight], ...], ...]}
nlohmann::json matrix_json(const TransferMatrix& P);

/// t,entropy_lebesgue,entropy_measure,density_file
std::string sweep_csv(const SweepResult& sweep, const std::vector<std::string>& density_files);

/// t,s,gap,l1_distance
std::string pairs_csv(const std::vector<DensityPair>& pairs);

/// Reads gap,l1_distance columns of a pairs CSV (header required).
std::vector<GapDistance> read_pairs_csv(const std::filesystem::path& path);

nlohmann::json to_json(const HolderFit& fit);
nlohmann::json to_json(const BoundReport& report);
nlohmann::json to_json(const LYReport& report);

/// Map definition:
/// {"omega": [[x1,x2],...],
///  "branches": [{"domain": [[x1,x2],...], "linear": [a,b,c,d], "translation": [u,v]}, ...]}
PiecewiseAffineMap map_from_json(const nlohmann::json& j);
nlohmann::json map_to_json(const PiecewiseAffineMap& map);

/// One filled path per cell, grey level linear from min (white) to max
/// (black) density, plus the stroked outline of omega.
std::string svg_heatmap(const DensityVector& rho, const UlamPartition& part);
void render_svg_heatmap(const DensityVector& rho, const UlamPartition& part, const std::filesystem::path& path);

/// Two-space indented JSON with a trailing newline.
std::string dump(const nlohmann::json& j);

}  // namespace ulamtent::io
