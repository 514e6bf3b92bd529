#pragma once

#include <array>
#include <string>
#include <vector>

#include "scatterlax/types.hpp"

namespace scatterlax {

// Triangulated closed surface with precomputed per-triangle quadrature data.
struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;

  // Filled by finalize():
  std::vector<Vec3> centroid;
  std::vector<Vec3> normal;
  std::vector<double> area;
  double total_area = 0.0;

  int num_triangles() const { return static_cast<int>(triangles.size()); }
  int num_vertices() const { return static_cast<int>(vertices.size()); }

  // Computes centroids/areas/normals and checks the mesh is a closed orientable
  // surface with positive-area triangles. Throws OpenSurface on violation.
  void finalize();

  bool closed_orientable() const;
  int euler_characteristic() const;

  // Max pairwise vertex distance.
  double diameter() const;

  const std::array<Vec3, 3> triangle_vertices(int t) const {
    return {vertices[triangles[t][0]], vertices[triangles[t][1]], vertices[triangles[t][2]]};
  }
};

// Icosphere with 20*4^level triangles, vertices projected to the exact sphere.
// level must lie in [0, 6].
TriMesh mesh_sphere(const Vec3& center, double radius, int level);

TriMesh scaled(const TriMesh& mesh, double factor);
TriMesh translated(const TriMesh& mesh, const Vec3& shift);

TriMesh read_off(const std::string& path);   // ASCII OFF
TriMesh read_stl(const std::string& path);   // binary little-endian STL
TriMesh read_mesh(const std::string& path);  // dispatch on file content
void write_off(const TriMesh& mesh, const std::string& path);

}  // namespace scatterlax
