#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "meshres/mesh.hpp"

namespace meshres {

struct IngestionReport {
  struct Skip {
    std::string object_id;
    std::string reason;
  };

  std::size_t objects_seen = 0;
  std::size_t meshes_kept = 0;
  std::size_t rings_dropped = 0;  // outer rings that collapsed below 3 vertices
  std::vector<Skip> skipped;
};

struct CityJsonResult {
  MeshDataset dataset;
  IngestionReport report;
};

// Reads the CityJSON 1.0/1.1 subset used by the pipeline: quantized
// "vertices" with an optional "transform", and CityObjects carrying Solid,
// MultiSurface or CompositeSurface geometry. Only outer rings and the
// exterior shell are kept; vertices are deduplicated by exact coordinate
// equality after de-quantization. Objects with fewer than `min_polygons`
// faces, or without usable geometry, are listed in the report.
//
// Throws ParseError on malformed JSON and SchemaError when the top-level
// members are missing.
CityJsonResult parse_cityjson(std::string_view bytes, std::size_t min_polygons,
                              SourceTag role = SourceTag::candidate);

CityJsonResult read_cityjson_file(const std::filesystem::path& path, std::size_t min_polygons,
                                  SourceTag role = SourceTag::candidate);

}  // namespace meshres
