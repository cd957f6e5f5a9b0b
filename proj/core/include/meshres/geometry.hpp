#pragma once

#include <span>
#include <vector>

#include "meshres/mesh.hpp"

namespace meshres {

// Floor applied to every denominator in the property and ratio formulas.
inline constexpr double kGuard = 1e-12;
// Faces below this area are reported as degenerate by validate_mesh.
inline constexpr double kDegenerateArea = 1e-12;

inline double guarded(double x) { return x > kGuard ? x : kGuard; }

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline Vec3 operator-(const Vertex3& a, const Vertex3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
double norm(const Vec3& v);

// Newell's normal of a (possibly slightly non-planar) ring. Its length is
// twice the enclosed area. `origin` is subtracted from every vertex first.
Vec3 newell_normal(std::span<const Vertex3> vertices, const Polygon& polygon,
                   const Vertex3& origin = {});
double face_area(std::span<const Vertex3> vertices, const Polygon& polygon);
double ring_length(std::span<const Vertex3> vertices, const Polygon& polygon);

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

// Andrew's monotone chain. Counter-clockwise, collinear points dropped,
// first point not repeated. Fewer than 3 distinct points yields the
// distinct points themselves.
std::vector<Point2> convex_hull(std::vector<Point2> points);

// Shoelace area (positive for counter-clockwise rings).
double signed_area(std::span<const Point2> ring);
double closed_length(std::span<const Point2> ring);

}  // namespace meshres
