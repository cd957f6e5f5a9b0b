#include "meshres/properties.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <tuple>

#include "meshres/csv.hpp"
#include "meshres/error.hpp"
#include "meshres/geometry.hpp"
#include "meshres/parallel.hpp"

namespace meshres {
namespace {

constexpr std::array<std::string_view, kPropertyCount> kNames = {
    "num_vertices",       "area",
    "volume",             "height_diff",
    "perimeter",          "circumference",
    "perimeter_index",    "convex_hull_area",
    "ave_centroid_distance", "shape_index",
    "fractality",         "elongation",
    "hemisphericality",   "cubeness",
    "axes_symmetry",      "density",
    "num_floors",         "bounding_box_width",
    "bounding_box_length", "bounding_box_height",
};

constexpr double kStoreyHeight = 3.0;

// All quantities below are computed on vertices shifted so that their
// centroid is at the origin; this keeps the results independent of where
// the mesh sits in the source CRS.
struct LocalMesh {
  std::vector<Vertex3> vertices;       // every pool vertex, shifted
  std::vector<std::uint32_t> unique;   // one referenced vertex per distinct position
};

LocalMesh localize(const PolygonMesh& mesh) {
  std::vector<bool> referenced(mesh.vertices.size(), false);
  for (const Polygon& p : mesh.polygons) {
    for (std::uint32_t id : p.vertex_ids) referenced[id] = true;
  }
  LocalMesh local;
  std::set<std::tuple<double, double, double>> seen;
  for (std::uint32_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vertex3& v = mesh.vertices[i];
    if (referenced[i] && seen.emplace(v.x, v.y, v.z).second) local.unique.push_back(i);
  }

  const Vertex3 ref = mesh.vertices[local.unique.front()];
  Vec3 mean;
  for (std::uint32_t i : local.unique) {
    const Vec3 d = mesh.vertices[i] - ref;
    mean.x += d.x;
    mean.y += d.y;
    mean.z += d.z;
  }
  const double n = static_cast<double>(local.unique.size());
  mean = {mean.x / n, mean.y / n, mean.z / n};

  local.vertices.reserve(mesh.vertices.size());
  for (const Vertex3& v : mesh.vertices) {
    const Vec3 d = v - ref;
    local.vertices.push_back({d.x - mean.x, d.y - mean.y, d.z - mean.z});
  }
  return local;
}

bool is_closed(const PolygonMesh& mesh) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> uses;
  for (const Polygon& p : mesh.polygons) {
    const auto& ids = p.vertex_ids;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      auto a = ids[i];
      auto b = ids[(i + 1) % ids.size()];
      if (a > b) std::swap(a, b);
      ++uses[{a, b}];
    }
  }
  return std::all_of(uses.begin(), uses.end(), [](const auto& e) { return e.second == 2; });
}

// Divergence theorem: each face contributes N·c / 6, with N the Newell
// normal (twice the area vector) and c the face's vertex mean.
double enclosed_volume(std::span<const Vertex3> vertices, const PolygonMesh& mesh) {
  double total = 0.0;
  for (const Polygon& p : mesh.polygons) {
    const Vec3 n = newell_normal(vertices, p);
    Vec3 c;
    for (std::uint32_t id : p.vertex_ids) {
      c.x += vertices[id].x;
      c.y += vertices[id].y;
      c.z += vertices[id].z;
    }
    const double k = 1.0 / static_cast<double>(p.vertex_ids.size());
    total += dot(n, {c.x * k, c.y * k, c.z * k});
  }
  return std::abs(total) / 6.0;
}

struct Footprint {
  double hull_area = 0.0;
  double hull_perimeter = 0.0;
  double length = 0.0;  // longer extent along the principal axes
  double width = 0.0;
};

// Principal direction of the footprint from the convex hull's area moments;
// falls back to point moments for a collapsed hull. Empty when the moments
// are isotropic and the direction is noise.
std::optional<double> principal_angle(std::span<const Point2> hull, double area) {
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  if (hull.size() >= 3 && area > kGuard) {
    double cx = 0.0, cy = 0.0, ixx = 0.0, iyy = 0.0, ixy = 0.0;
    for (std::size_t i = 0; i < hull.size(); ++i) {
      const Point2& a = hull[i];
      const Point2& b = hull[(i + 1) % hull.size()];
      const double w = a.x * b.y - b.x * a.y;
      cx += (a.x + b.x) * w;
      cy += (a.y + b.y) * w;
      ixx += (a.x * a.x + a.x * b.x + b.x * b.x) * w;
      iyy += (a.y * a.y + a.y * b.y + b.y * b.y) * w;
      ixy += (a.x * b.y + 2.0 * a.x * a.y + 2.0 * b.x * b.y + b.x * a.y) * w;
    }
    cx /= 6.0 * area;
    cy /= 6.0 * area;
    sxx = ixx / (12.0 * area) - cx * cx;
    syy = iyy / (12.0 * area) - cy * cy;
    sxy = ixy / (24.0 * area) - cx * cy;
  } else if (!hull.empty()) {
    double mx = 0.0, my = 0.0;
    for (const Point2& p : hull) {
      mx += p.x;
      my += p.y;
    }
    mx /= static_cast<double>(hull.size());
    my /= static_cast<double>(hull.size());
    for (const Point2& p : hull) {
      sxx += (p.x - mx) * (p.x - mx);
      syy += (p.y - my) * (p.y - my);
      sxy += (p.x - mx) * (p.y - my);
    }
  }
  const double spread = std::hypot(sxx - syy, 2.0 * sxy);
  if (!(spread > 1e-9 * (sxx + syy))) return std::nullopt;
  return 0.5 * std::atan2(2.0 * sxy, sxx - syy);
}

struct Extents {
  double along = 0.0;
  double across = 0.0;
};

Extents extents(std::span<const Point2> hull, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  double umin = std::numeric_limits<double>::infinity(), umax = -umin;
  double vmin = umin, vmax = -umin;
  for (const Point2& p : hull) {
    const double u = c * p.x + s * p.y;
    const double v = -s * p.x + c * p.y;
    umin = std::min(umin, u);
    umax = std::max(umax, u);
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  return {umax - umin, vmax - vmin};
}

// Isotropic hulls: the smallest-area rectangle aligned with a hull edge.
Extents min_area_extents(std::span<const Point2> hull) {
  Extents best = extents(hull, 0.0);
  double best_area = best.along * best.across;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Point2& a = hull[i];
    const Point2& b = hull[(i + 1) % hull.size()];
    const Extents e = extents(hull, std::atan2(b.y - a.y, b.x - a.x));
    if (e.along * e.across < best_area * (1.0 - 1e-12)) {
      best = e;
      best_area = e.along * e.across;
    }
  }
  return best;
}

Footprint footprint(const LocalMesh& local) {
  std::vector<Point2> points;
  points.reserve(local.unique.size());
  for (std::uint32_t i : local.unique) points.push_back({local.vertices[i].x, local.vertices[i].y});
  const std::vector<Point2> hull = convex_hull(std::move(points));

  Footprint fp;
  fp.hull_area = std::max(0.0, signed_area(hull));
  fp.hull_perimeter = closed_length(hull);

  if (hull.empty()) return fp;
  const std::optional<double> theta = principal_angle(hull, fp.hull_area);
  const Extents e = theta ? extents(hull, *theta) : min_area_extents(hull);
  fp.length = std::max(e.along, e.across);
  fp.width = std::min(e.along, e.across);
  return fp;
}

// Sum over the three principal planes of the RMS distance from each
// mirrored vertex to its nearest original vertex.
double axes_symmetry(const LocalMesh& local) {
  const std::size_t n = local.unique.size();
  std::vector<Eigen::Vector3d> pts;
  pts.reserve(n);
  for (std::uint32_t i : local.unique) {
    pts.emplace_back(local.vertices[i].x, local.vertices[i].y, local.vertices[i].z);
  }
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& p : pts) mean += p;
  mean /= static_cast<double>(n);
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : pts) cov += (p - mean) * (p - mean).transpose();

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  double total = 0.0;
  for (int axis = 0; axis < 3; ++axis) {
    const Eigen::Vector3d e = solver.eigenvectors().col(axis);
    double sum_sq = 0.0;
    for (const auto& p : pts) {
      const Eigen::Vector3d q = p - mean;
      const Eigen::Vector3d mirrored = q - 2.0 * q.dot(e) * e;
      double best = std::numeric_limits<double>::infinity();
      for (const auto& r : pts) best = std::min(best, (mirrored - (r - mean)).squaredNorm());
      sum_sq += best;
    }
    total += std::sqrt(sum_sq / static_cast<double>(n));
  }
  return total;
}

}  // namespace

std::string_view property_name(Property p) { return kNames[static_cast<std::size_t>(p)]; }

std::optional<Property> property_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return static_cast<Property>(i);
  }
  return std::nullopt;
}

PropertySchema PropertySchema::full() {
  PropertySchema schema;
  for (std::size_t i = 0; i < kPropertyCount; ++i) schema.properties_.push_back(static_cast<Property>(i));
  return schema;
}

PropertySchema PropertySchema::from_names(std::span<const std::string> names) {
  if (names.empty()) throw SchemaError("property schema must not be empty");
  PropertySchema schema;
  for (const std::string& name : names) {
    const auto p = property_from_name(name);
    if (!p) throw SchemaError("unknown property '" + name + "'");
    if (std::find(schema.properties_.begin(), schema.properties_.end(), *p) != schema.properties_.end()) {
      throw SchemaError("property '" + name + "' listed twice");
    }
    schema.properties_.push_back(*p);
  }
  return schema;
}

std::vector<std::string> PropertySchema::names() const {
  std::vector<std::string> out;
  for (Property p : properties_) out.emplace_back(property_name(p));
  return out;
}

std::optional<std::size_t> PropertySchema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < properties_.size(); ++i) {
    if (property_name(properties_[i]) == name) return i;
  }
  return std::nullopt;
}

std::size_t PropertySchema::require_index(std::string_view name) const {
  const auto i = index_of(name);
  if (!i) throw SchemaError("property '" + std::string(name) + "' is not in the schema");
  return *i;
}

PropertyVector compute_properties(const PolygonMesh& mesh, const PropertySchema& schema) {
  check_structure(mesh);
  const LocalMesh local = localize(mesh);
  const std::span<const Vertex3> verts = local.vertices;

  PropertyVector out;
  out.mesh_id = mesh.mesh_id;

  double area = 0.0;
  double perimeter = 0.0;
  for (const Polygon& p : mesh.polygons) {
    area += 0.5 * norm(newell_normal(verts, p));
    perimeter += ring_length(verts, p);
  }
  double volume = 0.0;
  if (is_closed(mesh)) {
    volume = enclosed_volume(verts, mesh);
  } else {
    out.warnings.push_back("mesh is not closed; volume reported as 0");
  }

  double zmin = std::numeric_limits<double>::infinity();
  double zmax = -zmin;
  double centroid_distance = 0.0;
  for (std::uint32_t i : local.unique) {
    const Vertex3& v = verts[i];
    zmin = std::min(zmin, v.z);
    zmax = std::max(zmax, v.z);
    centroid_distance += std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
  }
  const double num_vertices = static_cast<double>(local.unique.size());
  const double height = zmax - zmin;
  const Footprint fp = footprint(local);

  // Lazily evaluated: axes_symmetry is quadratic in the vertex count.
  std::optional<double> symmetry;

  out.values.reserve(schema.size());
  for (std::size_t i = 0; i < schema.size(); ++i) {
    double value = 0.0;
    switch (schema.property(i)) {
      case Property::num_vertices: value = num_vertices; break;
      case Property::area: value = area; break;
      case Property::volume: value = volume; break;
      case Property::height_diff: value = height; break;
      case Property::perimeter: value = perimeter; break;
      case Property::circumference: value = fp.hull_perimeter; break;
      case Property::perimeter_index: value = perimeter / guarded(area); break;
      case Property::convex_hull_area: value = fp.hull_area; break;
      case Property::ave_centroid_distance: value = centroid_distance / num_vertices; break;
      case Property::shape_index:
        value = fp.hull_perimeter / (2.0 * std::sqrt(std::numbers::pi * guarded(fp.hull_area)));
        break;
      case Property::fractality:
        value = fp.hull_perimeter > 1.0
                    ? std::max(0.0, 1.0 - std::log(guarded(fp.hull_area)) /
                                              (2.0 * std::log(fp.hull_perimeter)))
                    : 0.0;
        break;
      case Property::elongation: {
        const double longest = std::max({fp.length, fp.width, height});
        const double shortest = std::min({fp.length, fp.width, height});
        value = longest / guarded(shortest);
        break;
      }
      case Property::hemisphericality:
        value = 3.0 * std::sqrt(2.0 * std::numbers::pi) * volume / std::pow(guarded(area), 1.5);
        break;
      case Property::cubeness: value = 6.0 * std::cbrt(volume * volume) / guarded(area); break;
      case Property::axes_symmetry:
        if (!symmetry) symmetry = axes_symmetry(local);
        value = *symmetry;
        break;
      case Property::density: value = volume / guarded(fp.hull_area); break;
      case Property::num_floors: value = std::max(1.0, std::floor(height / kStoreyHeight)); break;
      case Property::bounding_box_width: value = fp.width; break;
      case Property::bounding_box_length: value = fp.length; break;
      case Property::bounding_box_height: value = height; break;
    }
    if (!std::isfinite(value)) {
      throw InvariantError("non-finite " + std::string(schema.name(i)) + " for mesh '" +
                           mesh.mesh_id + "'");
    }
    out.values.push_back(value);
  }
  return out;
}

PropertyVector normalize_log1p(const PropertyVector& raw) {
  if (raw.normalized) throw StateError("property vector '" + raw.mesh_id + "' is already normalized");
  PropertyVector out = raw;
  for (double& v : out.values) {
    if (v < -1.0) throw DomainError("log1p normalization needs values >= -1, got " + csv::format_double(v));
    v = std::log1p(v);
  }
  out.normalized = true;
  return out;
}

PropertyTable::PropertyTable(PropertySchema schema, bool normalized)
    : schema_(std::move(schema)), normalized_(normalized) {}

void PropertyTable::add(PropertyVector row) {
  if (row.values.size() != schema_.size()) {
    throw SchemaError("property vector '" + row.mesh_id + "' has " + std::to_string(row.values.size()) +
                      " values, schema has " + std::to_string(schema_.size()));
  }
  if (row.normalized != normalized_) {
    throw SchemaError("property vector '" + row.mesh_id + "' normalization does not match table");
  }
  if (by_id_.contains(row.mesh_id)) throw SchemaError("duplicate mesh_id '" + row.mesh_id + "'");
  by_id_.emplace(row.mesh_id, rows_.size());
  rows_.push_back(std::move(row));
}

const PropertyVector* PropertyTable::find(std::string_view mesh_id) const {
  auto it = by_id_.find(std::string(mesh_id));
  return it == by_id_.end() ? nullptr : &rows_[it->second];
}

const PropertyVector& PropertyTable::at(std::string_view mesh_id) const {
  const PropertyVector* row = find(mesh_id);
  if (row == nullptr) throw SchemaError("no property vector for '" + std::string(mesh_id) + "'");
  return *row;
}

PropertyTable PropertyTable::subset(std::span<const std::string> mesh_ids) const {
  PropertyTable out(schema_, normalized_);
  for (const std::string& id : mesh_ids) out.add(at(id));
  return out;
}

PropertyTable featurize(const MeshDataset& dataset, const PropertySchema& schema, bool normalize) {
  const auto meshes = dataset.meshes();
  std::vector<PropertyVector> rows(meshes.size());
  parallel_for(meshes.size(), [&](std::size_t i) {
    PropertyVector raw = compute_properties(meshes[i], schema);
    rows[i] = normalize ? normalize_log1p(raw) : std::move(raw);
  });
  PropertyTable table(schema, normalize);
  for (PropertyVector& row : rows) table.add(std::move(row));
  return table;
}

void write_property_csv(std::ostream& out, const PropertyTable& table) {
  std::vector<std::string> header{"mesh_id"};
  for (const std::string& name : table.schema().names()) header.push_back(name);
  out << csv::join(header) << '\n';

  std::vector<const PropertyVector*> sorted;
  for (const PropertyVector& row : table.rows()) sorted.push_back(&row);
  std::sort(sorted.begin(), sorted.end(),
            [](const auto* a, const auto* b) { return a->mesh_id < b->mesh_id; });
  for (const PropertyVector* row : sorted) {
    std::vector<std::string> fields{row->mesh_id};
    for (double v : row->values) fields.push_back(csv::format_double(v));
    out << csv::join(fields) << '\n';
  }
}

PropertyTable read_property_csv(std::istream& in, bool normalized) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("property CSV is empty");
  std::vector<std::string> header = csv::split(line);
  if (header.empty() || header.front() != "mesh_id") {
    throw SchemaError("property CSV must start with a mesh_id column");
  }
  header.erase(header.begin());
  PropertyTable table(PropertySchema::from_names(header), normalized);
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto fields = csv::split(line);
    if (fields.size() != header.size() + 1) throw SchemaError("property CSV row has wrong width");
    PropertyVector row;
    row.mesh_id = fields[0];
    row.normalized = normalized;
    for (std::size_t i = 1; i < fields.size(); ++i) row.values.push_back(csv::parse_double(fields[i]));
    table.add(std::move(row));
  }
  return table;
}

}  // namespace meshres
