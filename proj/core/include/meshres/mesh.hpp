#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace meshres {

struct Vertex3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vertex3&, const Vertex3&) = default;
};

// A single ring of vertex-pool indices. The closing edge back to the first
// vertex is implicit; the first id is never repeated at the end.
struct Polygon {
  std::vector<std::uint32_t> vertex_ids;

  friend bool operator==(const Polygon&, const Polygon&) = default;
};

enum class SourceTag { candidate, index };

std::string_view to_string(SourceTag tag);
SourceTag parse_source_tag(std::string_view text);

struct PolygonMesh {
  std::string mesh_id;
  std::vector<Vertex3> vertices;
  std::vector<Polygon> polygons;
  SourceTag source = SourceTag::index;
};

// Throws SchemaError if the mesh violates the structural invariants: at
// least one polygon, every ring has >= 3 ids, valid indices, no repeated
// consecutive ids, finite coordinates.
void check_structure(const PolygonMesh& mesh);

struct ValidationReport {
  bool closed = false;
  std::size_t boundary_edges = 0;     // undirected edges used by one face
  std::size_t nonmanifold_edges = 0;  // undirected edges used by > 2 faces
  std::size_t degenerate_polygons = 0;
  std::size_t duplicate_vertices = 0;
};

// Diagnostic only; assumes check_structure passes.
ValidationReport validate_mesh(const PolygonMesh& mesh);

// Meshes of one source, keyed by mesh_id. Treated as immutable once the
// pipeline starts reading it.
class MeshDataset {
 public:
  explicit MeshDataset(SourceTag role = SourceTag::index) : role_(role) {}

  // Throws SchemaError on a duplicate mesh_id.
  void add(PolygonMesh mesh);

  SourceTag role() const noexcept { return role_; }
  std::size_t size() const noexcept { return meshes_.size(); }
  bool empty() const noexcept { return meshes_.empty(); }
  std::span<const PolygonMesh> meshes() const noexcept { return meshes_; }

  const PolygonMesh* find(std::string_view mesh_id) const;
  // Throws SchemaError when absent.
  const PolygonMesh& at(std::string_view mesh_id) const;
  bool contains(std::string_view mesh_id) const { return find(mesh_id) != nullptr; }

  // Removes the listed ids (missing ids are ignored) and returns them in
  // dataset order.
  std::vector<PolygonMesh> extract(std::span<const std::string> mesh_ids);

 private:
  void reindex();

  SourceTag role_;
  std::vector<PolygonMesh> meshes_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

}  // namespace meshres
