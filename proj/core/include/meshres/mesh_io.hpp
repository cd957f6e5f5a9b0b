#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "meshres/mesh.hpp"

namespace meshres {

// Native mesh format: JSON lines, one mesh per line,
//   {"mesh_id": "...", "vertices": [[x,y,z], ...], "polygons": [[i, ...], ...]}
// Coordinates are written as shortest round-trip decimals, so a
// write/read cycle reproduces every double bit for bit.
std::string to_jsonl_line(const PolygonMesh& mesh);
PolygonMesh parse_jsonl_line(std::string_view line, SourceTag role);

void write_jsonl(std::ostream& out, const MeshDataset& dataset);
MeshDataset read_jsonl(std::istream& in, SourceTag role);

void write_jsonl_file(const std::filesystem::path& path, const MeshDataset& dataset);

// Loads either format: *.jsonl is native, anything else is parsed as
// CityJSON with the given polygon threshold.
MeshDataset load_dataset(const std::filesystem::path& path, SourceTag role,
                         std::size_t min_polygons = 0);

}  // namespace meshres
