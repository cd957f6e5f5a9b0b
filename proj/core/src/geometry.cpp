#include "meshres/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace meshres {

double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

Vec3 newell_normal(std::span<const Vertex3> vertices, const Polygon& polygon,
                   const Vertex3& origin) {
  Vec3 n;
  const auto& ids = polygon.vertex_ids;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const Vec3 a = vertices[ids[i]] - origin;
    const Vec3 b = vertices[ids[(i + 1) % ids.size()]] - origin;
    n.x += (a.y - b.y) * (a.z + b.z);
    n.y += (a.z - b.z) * (a.x + b.x);
    n.z += (a.x - b.x) * (a.y + b.y);
  }
  return n;
}

double face_area(std::span<const Vertex3> vertices, const Polygon& polygon) {
  // Centering on the first vertex keeps the products small for meshes far
  // from the CRS origin.
  return 0.5 * norm(newell_normal(vertices, polygon, vertices[polygon.vertex_ids.front()]));
}

double ring_length(std::span<const Vertex3> vertices, const Polygon& polygon) {
  double total = 0.0;
  const auto& ids = polygon.vertex_ids;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    total += norm(vertices[ids[(i + 1) % ids.size()]] - vertices[ids[i]]);
  }
  return total;
}

namespace {

double turn(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

}  // namespace

std::vector<Point2> convex_hull(std::vector<Point2> points) {
  std::sort(points.begin(), points.end(), [](const Point2& a, const Point2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  points.erase(std::unique(points.begin(), points.end()), points.end());
  if (points.size() < 3) return points;

  std::vector<Point2> hull(2 * points.size());
  std::size_t k = 0;
  for (const Point2& p : points) {
    while (k >= 2 && turn(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = points.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && turn(hull[k - 2], hull[k - 1], points[i]) <= 0) --k;
    hull[k++] = points[i];
  }
  hull.resize(k - 1);
  return hull;
}

double signed_area(std::span<const Point2> ring) {
  if (ring.size() < 3) return 0.0;
  double twice = 0.0;
  const Point2& o = ring.front();
  for (std::size_t i = 1; i + 1 < ring.size(); ++i) {
    twice += turn(o, ring[i], ring[i + 1]);
  }
  return 0.5 * twice;
}

double closed_length(std::span<const Point2> ring) {
  double total = 0.0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const Point2& a = ring[i];
    const Point2& b = ring[(i + 1) % ring.size()];
    total += std::hypot(b.x - a.x, b.y - a.y);
  }
  return total;
}

}  // namespace meshres
