#include "meshres/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_set>
#include <utility>

#include "meshres/error.hpp"
#include "meshres/geometry.hpp"

namespace meshres {

std::string_view to_string(SourceTag tag) {
  return tag == SourceTag::candidate ? "candidate" : "index";
}

SourceTag parse_source_tag(std::string_view text) {
  if (text == "candidate") return SourceTag::candidate;
  if (text == "index") return SourceTag::index;
  throw SchemaError("unknown source tag '" + std::string(text) + "'");
}

void check_structure(const PolygonMesh& mesh) {
  const auto fail = [&](const std::string& why) {
    throw SchemaError("mesh '" + mesh.mesh_id + "': " + why);
  };
  if (mesh.polygons.empty()) fail("no polygons");
  for (const Vertex3& v : mesh.vertices) {
    if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.z)) {
      fail("non-finite vertex coordinate");
    }
  }
  const std::size_t n = mesh.vertices.size();
  for (std::size_t p = 0; p < mesh.polygons.size(); ++p) {
    const auto& ids = mesh.polygons[p].vertex_ids;
    if (ids.size() < 3) fail("polygon " + std::to_string(p) + " has fewer than 3 vertices");
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (ids[i] >= n) fail("polygon " + std::to_string(p) + " references missing vertex");
      if (ids[i] == ids[(i + 1) % ids.size()]) {
        fail("polygon " + std::to_string(p) + " repeats a vertex on an edge");
      }
    }
  }
}

ValidationReport validate_mesh(const PolygonMesh& mesh) {
  ValidationReport report;

  std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> edge_use;
  for (const Polygon& poly : mesh.polygons) {
    const auto& ids = poly.vertex_ids;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      std::uint32_t a = ids[i];
      std::uint32_t b = ids[(i + 1) % ids.size()];
      if (a > b) std::swap(a, b);
      ++edge_use[{a, b}];
    }
    if (face_area(mesh.vertices, poly) < kDegenerateArea) ++report.degenerate_polygons;
  }
  for (const auto& [edge, count] : edge_use) {
    if (count == 1) ++report.boundary_edges;
    if (count > 2) ++report.nonmanifold_edges;
  }
  report.closed = !edge_use.empty() && report.boundary_edges == 0 && report.nonmanifold_edges == 0;

  std::set<std::tuple<double, double, double>> seen;
  for (const Vertex3& v : mesh.vertices) {
    if (!seen.emplace(v.x, v.y, v.z).second) ++report.duplicate_vertices;
  }
  return report;
}

void MeshDataset::add(PolygonMesh mesh) {
  if (by_id_.contains(mesh.mesh_id)) {
    throw SchemaError("duplicate mesh_id '" + mesh.mesh_id + "'");
  }
  mesh.source = role_;
  by_id_.emplace(mesh.mesh_id, meshes_.size());
  meshes_.push_back(std::move(mesh));
}

const PolygonMesh* MeshDataset::find(std::string_view mesh_id) const {
  auto it = by_id_.find(std::string(mesh_id));
  return it == by_id_.end() ? nullptr : &meshes_[it->second];
}

const PolygonMesh& MeshDataset::at(std::string_view mesh_id) const {
  const PolygonMesh* mesh = find(mesh_id);
  if (mesh == nullptr) {
    throw SchemaError("no mesh with id '" + std::string(mesh_id) + "' in " +
                      std::string(to_string(role_)) + " dataset");
  }
  return *mesh;
}

std::vector<PolygonMesh> MeshDataset::extract(std::span<const std::string> mesh_ids) {
  std::unordered_set<std::string> wanted(mesh_ids.begin(), mesh_ids.end());
  std::vector<PolygonMesh> taken;
  std::vector<PolygonMesh> kept;
  for (PolygonMesh& mesh : meshes_) {
    (wanted.contains(mesh.mesh_id) ? taken : kept).push_back(std::move(mesh));
  }
  meshes_ = std::move(kept);
  reindex();
  return taken;
}

void MeshDataset::reindex() {
  by_id_.clear();
  for (std::size_t i = 0; i < meshes_.size(); ++i) by_id_.emplace(meshes_[i].mesh_id, i);
}

}  // namespace meshres
