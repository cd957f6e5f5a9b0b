#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace meshres::test {

namespace fs = std::filesystem;

fs::path fixture(const std::string& name) { return fs::path(MESHRES_FIXTURE_DIR) / name; }

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::path(MESHRES_SCRATCH_DIR) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PolygonMesh box(double sx, double sy, double sz, std::string id) {
  PolygonMesh m;
  m.mesh_id = std::move(id);
  m.vertices = {{0, 0, 0}, {sx, 0, 0}, {sx, sy, 0}, {0, sy, 0}, {0, 0, sz}, {sx, 0, sz}, {sx, sy, sz}, {0, sy, sz}};
  m.polygons = {{{0, 3, 2, 1}}, {{4, 5, 6, 7}}, {{0, 1, 5, 4}}, {{1, 2, 6, 5}}, {{2, 3, 7, 6}}, {{3, 0, 4, 7}}};
  return m;
}

namespace {

struct Mat3 {
  double m[3][3];
};

Mat3 random_rotation(std::mt19937_64& rng) {
  // Normalized random quaternion.
  std::normal_distribution<double> n(0.0, 1.0);
  double q[4];
  double len = 0.0;
  for (double& v : q) {
    v = n(rng);
    len += v * v;
  }
  len = std::sqrt(len);
  for (double& v : q) v /= len;
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  return {{{1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)},
           {2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)},
           {2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)}}};
}

}  // namespace

PolygonMesh random_convex_polyhedron(std::mt19937_64& rng, std::string id) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> nv(3, 12);
  const int n = nv(rng);
  // Convex footprint: sorted angles on an ellipse.
  std::vector<double> angles(n);
  for (double& a : angles) a = 2.0 * M_PI * u(rng);
  std::sort(angles.begin(), angles.end());
  angles.erase(std::unique(angles.begin(), angles.end()), angles.end());
  while (angles.size() < 3) angles.push_back(angles.back() + 1.0);
  const double ax = 1.0 + 20.0 * u(rng);
  const double ay = 1.0 + 20.0 * u(rng);
  const auto count = static_cast<std::uint32_t>(angles.size());

  PolygonMesh m;
  m.mesh_id = std::move(id);
  for (double a : angles) m.vertices.push_back({ax * std::cos(a), ay * std::sin(a), 0.0});
  const double h = 1.0 + 30.0 * u(rng);
  if (u(rng) < 0.5) {
    // Frustum: top ring is a shrunk, shifted homothetic copy.
    const double s = 0.2 + 0.8 * u(rng);
    const double cx = 0.3 * ax * (u(rng) - 0.5) * (1 - s);
    const double cy = 0.3 * ay * (u(rng) - 0.5) * (1 - s);
    for (std::uint32_t i = 0; i < count; ++i) {
      const Vertex3 b = m.vertices[i];
      m.vertices.push_back({cx + s * b.x, cy + s * b.y, h});
    }
    Polygon bottom, top;
    for (std::uint32_t i = 0; i < count; ++i) {
      bottom.vertex_ids.push_back(count - 1 - i);
      top.vertex_ids.push_back(count + i);
      const std::uint32_t j = (i + 1) % count;
      m.polygons.push_back({{i, j, count + j, count + i}});
    }
    m.polygons.push_back(bottom);
    m.polygons.push_back(top);
  } else {
    // Bipyramid with apexes over an interior point.
    const double px = 0.2 * ax * (u(rng) - 0.5);
    const double py = 0.2 * ay * (u(rng) - 0.5);
    m.vertices.push_back({px, py, h});
    m.vertices.push_back({px, py, -0.5 * h});
    for (std::uint32_t i = 0; i < count; ++i) {
      const std::uint32_t j = (i + 1) % count;
      m.polygons.push_back({{i, j, count}});
      m.polygons.push_back({{j, i, count + 1}});
    }
  }
  const Mat3 r = random_rotation(rng);
  const double ox = 1000.0 * (u(rng) - 0.5), oy = 1000.0 * (u(rng) - 0.5), oz = 100.0 * u(rng);
  for (Vertex3& v : m.vertices) {
    const double x = v.x, y = v.y, z = v.z;
    v = {r.m[0][0] * x + r.m[0][1] * y + r.m[0][2] * z + ox, r.m[1][0] * x + r.m[1][1] * y + r.m[1][2] * z + oy,
         r.m[2][0] * x + r.m[2][1] * y + r.m[2][2] * z + oz};
  }
  return m;
}

PolygonMesh translated(PolygonMesh mesh, double dx, double dy, double dz) {
  for (Vertex3& v : mesh.vertices) v = {v.x + dx, v.y + dy, v.z + dz};
  return mesh;
}

PolygonMesh rotated_z(PolygonMesh mesh, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  for (Vertex3& v : mesh.vertices) v = {c * v.x - s * v.y, s * v.x + c * v.y, v.z};
  return mesh;
}

PolygonMesh scaled(PolygonMesh mesh, double s) {
  for (Vertex3& v : mesh.vertices) v = {s * v.x, s * v.y, s * v.z};
  return mesh;
}

namespace {

template <class Fn>
void fan(const PolygonMesh& mesh, Fn&& fn) {
  for (const Polygon& p : mesh.polygons) {
    const Vertex3& a = mesh.vertices[p.vertex_ids[0]];
    for (std::size_t i = 1; i + 1 < p.vertex_ids.size(); ++i) {
      fn(a, mesh.vertices[p.vertex_ids[i]], mesh.vertices[p.vertex_ids[i + 1]]);
    }
  }
}

}  // namespace

double oracle_area(const PolygonMesh& mesh) {
  double total = 0.0;
  fan(mesh, [&](const Vertex3& a, const Vertex3& b, const Vertex3& c) {
    const double ux = b.x - a.x, uy = b.y - a.y, uz = b.z - a.z;
    const double vx = c.x - a.x, vy = c.y - a.y, vz = c.z - a.z;
    const double cx = uy * vz - uz * vy, cy = uz * vx - ux * vz, cz = ux * vy - uy * vx;
    total += 0.5 * std::sqrt(cx * cx + cy * cy + cz * cz);
  });
  return total;
}

double oracle_volume(const PolygonMesh& mesh) {
  double total = 0.0;
  fan(mesh, [&](const Vertex3& a, const Vertex3& b, const Vertex3& c) {
    total += a.x * (b.y * c.z - b.z * c.y) - a.y * (b.x * c.z - b.z * c.x) + a.z * (b.x * c.y - b.y * c.x);
  });
  return std::abs(total) / 6.0;
}

std::vector<std::size_t> brute_knn(std::size_t dim, const std::vector<double>& coords,
                                   const std::vector<std::string>& ids, const std::vector<double>& query,
                                   std::size_t k) {
  const std::size_t n = ids.size();
  std::vector<double> d2(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      const double d = coords[i * dim + j] - query[j];
      d2[i] += d * d;
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return d2[a] != d2[b] ? d2[a] < d2[b] : ids[a] < ids[b];
  });
  order.resize(std::min(k, n));
  return order;
}

double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-9});
  return std::abs(a - b) / scale;
}

}  // namespace meshres::test
