#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "fracharm/grid.hpp"

namespace fracharm {

// GridFunction on disk: a CSV with header `x,value` (1D) or `x,y,value` (2D),
// one row per cell center in flat-index order, plus a JSON sidecar
// {"box": [[lo, hi], ...], "h": ..., "dim": ...}.
nlohmann::json grid_descriptor(const GridFunction& f);
Box box_from_json(const nlohmann::json& j);
nlohmann::json box_to_json(const Box& box);

void write_grid_csv(const GridFunction& f, const std::filesystem::path& csv_path);
void write_grid_function(const GridFunction& f, const std::filesystem::path& csv_path,
                         const std::filesystem::path& sidecar_path);
GridFunction read_grid_function(const std::filesystem::path& csv_path, const std::filesystem::path& sidecar_path);

// Sidecar path convention: "<stem>.csv" -> "<stem>.json".
std::filesystem::path sidecar_for(const std::filesystem::path& csv_path);

// Shortest round-trip decimal representation.
std::string format_double(double v);

}  // namespace fracharm
