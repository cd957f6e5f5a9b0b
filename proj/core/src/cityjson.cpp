#include "meshres/cityjson.hpp"

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <tuple>

#include "json.hpp"
#include "meshres/error.hpp"

namespace meshres {
namespace {

using nlohmann::json;

struct Transform {
  double scale[3] = {1.0, 1.0, 1.0};
  double translate[3] = {0.0, 0.0, 0.0};
};

Transform read_transform(const json& doc) {
  Transform t;
  auto it = doc.find("transform");
  if (it == doc.end()) return t;
  const json& scale = it->at("scale");
  const json& translate = it->at("translate");
  if (!scale.is_array() || scale.size() != 3 || !translate.is_array() || translate.size() != 3) {
    throw SchemaError("CityJSON transform needs 3-element scale and translate");
  }
  for (int i = 0; i < 3; ++i) {
    t.scale[i] = scale[i].get<double>();
    t.translate[i] = translate[i].get<double>();
  }
  return t;
}

bool supported_type(const std::string& type) {
  return type == "Solid" || type == "MultiSurface" || type == "CompositeSurface";
}

std::string lod_string(const json& geometry) {
  auto it = geometry.find("lod");
  if (it == geometry.end()) return "";
  return it->is_string() ? it->get<std::string>() : it->dump();
}

// Highest LoD string among supported geometries; first occurrence on ties.
const json* pick_geometry(const json& object, std::string* unsupported) {
  auto it = object.find("geometry");
  if (it == object.end() || !it->is_array()) return nullptr;
  const json* best = nullptr;
  std::string best_lod;
  for (const json& geometry : *it) {
    const std::string type = geometry.value("type", "");
    if (!supported_type(type)) {
      if (unsupported->empty()) *unsupported = type;
      continue;
    }
    const std::string lod = lod_string(geometry);
    if (best == nullptr || lod > best_lod) {
      best = &geometry;
      best_lod = lod;
    }
  }
  return best;
}

// Flattens the boundaries to the list of outer rings.
std::vector<const json*> outer_rings(const json& geometry) {
  const std::string type = geometry.at("type").get<std::string>();
  const json& boundaries = geometry.at("boundaries");
  const json* surfaces = &boundaries;
  if (type == "Solid") {
    if (boundaries.empty()) return {};
    surfaces = &boundaries.at(0);  // exterior shell
  }
  std::vector<const json*> rings;
  for (const json& surface : *surfaces) {
    if (!surface.is_array() || surface.empty()) continue;
    rings.push_back(&surface.at(0));
  }
  return rings;
}

class MeshBuilder {
 public:
  MeshBuilder(const std::vector<Vertex3>& pool) : pool_(pool) {}

  // Returns false when the ring collapses.
  bool add_ring(const json& ring) {
    std::vector<std::uint32_t> ids;
    for (const json& index : ring) {
      const auto global = index.get<std::int64_t>();
      if (global < 0 || static_cast<std::size_t>(global) >= pool_.size()) {
        throw SchemaError("vertex index " + std::to_string(global) + " out of range");
      }
      const std::uint32_t local = local_id(pool_[static_cast<std::size_t>(global)]);
      if (ids.empty() || ids.back() != local) ids.push_back(local);
    }
    while (ids.size() > 1 && ids.front() == ids.back()) ids.pop_back();
    if (ids.size() < 3) return false;
    mesh_.polygons.push_back(Polygon{std::move(ids)});
    return true;
  }

  PolygonMesh take(std::string id) {
    mesh_.mesh_id = std::move(id);
    return std::move(mesh_);
  }

  std::size_t polygon_count() const { return mesh_.polygons.size(); }

 private:
  std::uint32_t local_id(const Vertex3& v) {
    auto [it, inserted] = ids_.try_emplace(std::make_tuple(v.x, v.y, v.z),
                                           static_cast<std::uint32_t>(mesh_.vertices.size()));
    if (inserted) mesh_.vertices.push_back(v);
    return it->second;
  }

  const std::vector<Vertex3>& pool_;
  std::map<std::tuple<double, double, double>, std::uint32_t> ids_;
  PolygonMesh mesh_;
};

}  // namespace

CityJsonResult parse_cityjson(std::string_view bytes, std::size_t min_polygons, SourceTag role) {
  json doc;
  try {
    doc = json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed CityJSON: ") + e.what(), e.byte);
  }
  if (!doc.is_object()) throw SchemaError("CityJSON document must be an object");
  if (!doc.contains("vertices")) throw SchemaError("CityJSON document has no \"vertices\"");
  if (!doc.contains("CityObjects")) throw SchemaError("CityJSON document has no \"CityObjects\"");

  CityJsonResult result{MeshDataset(role), {}};
  std::vector<Vertex3> pool;
  try {
    const Transform t = read_transform(doc);
    const json& vertices = doc.at("vertices");
    pool.reserve(vertices.size());
    for (const json& v : vertices) {
      if (!v.is_array() || v.size() != 3) throw SchemaError("vertex must be an [x, y, z] triple");
      pool.push_back({v[0].get<double>() * t.scale[0] + t.translate[0],
                      v[1].get<double>() * t.scale[1] + t.translate[1],
                      v[2].get<double>() * t.scale[2] + t.translate[2]});
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("bad CityJSON vertex data: ") + e.what());
  }

  IngestionReport& report = result.report;
  for (const auto& [object_id, object] : doc.at("CityObjects").items()) {
    ++report.objects_seen;
    std::string unsupported;
    const json* geometry = pick_geometry(object, &unsupported);
    if (geometry == nullptr) {
      report.skipped.push_back({object_id, unsupported.empty()
                                               ? "no geometry"
                                               : "unsupported geometry type " + unsupported});
      continue;
    }
    MeshBuilder builder(pool);
    try {
      for (const json* ring : outer_rings(*geometry)) {
        if (!builder.add_ring(*ring)) ++report.rings_dropped;
      }
    } catch (const std::exception& e) {
      report.skipped.push_back({object_id, std::string("invalid boundaries: ") + e.what()});
      continue;
    }
    if (builder.polygon_count() == 0 || builder.polygon_count() < min_polygons) {
      report.skipped.push_back({object_id, std::to_string(builder.polygon_count()) +
                                               " polygons, below minimum of " +
                                               std::to_string(min_polygons)});
      continue;
    }
    result.dataset.add(builder.take(object_id));
    ++report.meshes_kept;
  }
  return result;
}

CityJsonResult read_cityjson_file(const std::filesystem::path& path, std::size_t min_polygons,
                                  SourceTag role) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_cityjson(buffer.str(), min_polygons, role);
}

}  // namespace meshres
