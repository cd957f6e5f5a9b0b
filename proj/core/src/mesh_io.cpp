#include "meshres/mesh_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "json.hpp"
#include "meshres/cityjson.hpp"
#include "meshres/error.hpp"

namespace meshres {

using nlohmann::json;

std::string to_jsonl_line(const PolygonMesh& mesh) {
  json vertices = json::array();
  for (const Vertex3& v : mesh.vertices) vertices.push_back({v.x, v.y, v.z});
  json polygons = json::array();
  for (const Polygon& p : mesh.polygons) polygons.push_back(p.vertex_ids);
  // ordered_json keeps the documented member order in the output line.
  nlohmann::ordered_json line;
  line["mesh_id"] = mesh.mesh_id;
  line["vertices"] = std::move(vertices);
  line["polygons"] = std::move(polygons);
  return line.dump();
}

PolygonMesh parse_jsonl_line(std::string_view line, SourceTag role) {
  json doc;
  try {
    doc = json::parse(line.begin(), line.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed mesh line: ") + e.what(), e.byte);
  }
  PolygonMesh mesh;
  mesh.source = role;
  try {
    mesh.mesh_id = doc.at("mesh_id").get<std::string>();
    for (const json& v : doc.at("vertices")) {
      if (v.size() != 3) throw SchemaError("vertex must be an [x, y, z] triple");
      mesh.vertices.push_back({v[0].get<double>(), v[1].get<double>(), v[2].get<double>()});
    }
    for (const json& p : doc.at("polygons")) {
      mesh.polygons.push_back(Polygon{p.get<std::vector<std::uint32_t>>()});
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("bad mesh line: ") + e.what());
  }
  check_structure(mesh);
  return mesh;
}

void write_jsonl(std::ostream& out, const MeshDataset& dataset) {
  for (const PolygonMesh& mesh : dataset.meshes()) out << to_jsonl_line(mesh) << '\n';
}

MeshDataset read_jsonl(std::istream& in, SourceTag role) {
  MeshDataset dataset(role);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      dataset.add(parse_jsonl_line(line, role));
    } catch (const Error& e) {
      throw SchemaError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return dataset;
}

void write_jsonl_file(const std::filesystem::path& path, const MeshDataset& dataset) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_jsonl(out, dataset);
}

MeshDataset load_dataset(const std::filesystem::path& path, SourceTag role,
                         std::size_t min_polygons) {
  if (path.extension() == ".jsonl") {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    return read_jsonl(in, role);
  }
  return read_cityjson_file(path, min_polygons, role).dataset;
}

}  // namespace meshres
