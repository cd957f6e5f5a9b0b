#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "meshres/mesh.hpp"

namespace meshres::test {

std::filesystem::path fixture(const std::string& name);
// Fresh empty directory under the build tree, removed first if present.
std::filesystem::path scratch_dir(const std::string& name);
std::string slurp(const std::filesystem::path& path);

// Axis-aligned box [0,sx] x [0,sy] x [0,sz], outward quads.
PolygonMesh box(double sx, double sy, double sz, std::string id = "box");

// Random closed convex polyhedron under a random 3D rotation and offset:
// a frustum over a convex footprint (planar quads plus two n-gons) or a
// bipyramid (triangles), picked at random.
PolygonMesh random_convex_polyhedron(std::mt19937_64& rng, std::string id);

PolygonMesh translated(PolygonMesh mesh, double dx, double dy, double dz);
PolygonMesh rotated_z(PolygonMesh mesh, double angle);
PolygonMesh scaled(PolygonMesh mesh, double s);

// Reference values by fan triangulation of every face.
double oracle_area(const PolygonMesh& mesh);
// |sum of signed tetrahedra (origin, fan triangle)| / 6.
double oracle_volume(const PolygonMesh& mesh);

// Brute-force k nearest rows by (distance, id), as indices.
std::vector<std::size_t> brute_knn(std::size_t dim, const std::vector<double>& coords,
                                   const std::vector<std::string>& ids, const std::vector<double>& query,
                                   std::size_t k);

// |a - b| / max(|a|, |b|, 1e-9).
double rel_diff(double a, double b);

}  // namespace meshres::test
