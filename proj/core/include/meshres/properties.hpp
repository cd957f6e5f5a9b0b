#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "meshres/mesh.hpp"

namespace meshres {

// Geometric property registry. The enumerator order is the default feature
// order of the whole pipeline.
enum class Property : std::uint8_t {
  num_vertices,
  area,
  volume,
  height_diff,
  perimeter,
  circumference,
  perimeter_index,
  convex_hull_area,
  ave_centroid_distance,
  shape_index,
  fractality,
  elongation,
  hemisphericality,
  cubeness,
  axes_symmetry,
  density,
  num_floors,
  bounding_box_width,
  bounding_box_length,
  bounding_box_height,
};

inline constexpr std::size_t kPropertyCount = 20;

std::string_view property_name(Property p);
std::optional<Property> property_from_name(std::string_view name);

// Ordered, duplicate-free selection of registry properties. Persisted with
// every trained model and checked again at inference time.
class PropertySchema {
 public:
  PropertySchema() = default;

  static PropertySchema full();
  // Throws SchemaError on unknown or repeated names, or an empty list.
  static PropertySchema from_names(std::span<const std::string> names);

  std::size_t size() const noexcept { return properties_.size(); }
  Property property(std::size_t i) const { return properties_.at(i); }
  std::string_view name(std::size_t i) const { return property_name(properties_.at(i)); }
  std::vector<std::string> names() const;
  std::optional<std::size_t> index_of(std::string_view name) const;
  // Throws SchemaError when absent.
  std::size_t require_index(std::string_view name) const;

  friend bool operator==(const PropertySchema&, const PropertySchema&) = default;

 private:
  std::vector<Property> properties_;
};

struct PropertyVector {
  std::string mesh_id;
  std::vector<double> values;  // aligned with the schema
  bool normalized = false;
  std::vector<std::string> warnings;
};

// Raw property values. Degenerate inputs yield finite values through
// max(x, 1e-12) denominators; volume is 0 (with a warning) for open meshes.
// Throws SchemaError if the mesh is structurally invalid.
PropertyVector compute_properties(const PolygonMesh& mesh, const PropertySchema& schema);

// Element-wise log(1 + x). Throws DomainError for entries below -1 and
// StateError if the vector is already normalized.
PropertyVector normalize_log1p(const PropertyVector& raw);

// Property vectors for one dataset under one schema, addressable by id.
class PropertyTable {
 public:
  PropertyTable() = default;
  PropertyTable(PropertySchema schema, bool normalized);

  // Throws SchemaError on a length mismatch, a normalization mismatch or a
  // duplicate id.
  void add(PropertyVector row);

  const PropertySchema& schema() const noexcept { return schema_; }
  bool normalized() const noexcept { return normalized_; }
  std::size_t size() const noexcept { return rows_.size(); }
  bool empty() const noexcept { return rows_.empty(); }
  std::span<const PropertyVector> rows() const noexcept { return rows_; }

  const PropertyVector* find(std::string_view mesh_id) const;
  const PropertyVector& at(std::string_view mesh_id) const;

  PropertyTable subset(std::span<const std::string> mesh_ids) const;

 private:
  PropertySchema schema_;
  bool normalized_ = false;
  std::vector<PropertyVector> rows_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

// Computes (and optionally log-normalizes) every mesh of the dataset, in
// parallel; row order follows the dataset.
PropertyTable featurize(const MeshDataset& dataset, const PropertySchema& schema, bool normalize);

// Property matrix CSV: header `mesh_id,<schema names>`, rows sorted by
// mesh_id.
void write_property_csv(std::ostream& out, const PropertyTable& table);
PropertyTable read_property_csv(std::istream& in, bool normalized);

}  // namespace meshres
