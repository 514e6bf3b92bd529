#include "scatterlax/trimesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <utility>

namespace scatterlax {

void TriMesh::finalize() {
  const int nt = num_triangles();
  if (nt == 0) fail(ErrorCode::OpenSurface, "mesh has no triangles");
  for (const auto& tri : triangles)
    for (int idx : tri)
      if (idx < 0 || idx >= num_vertices()) fail(ErrorCode::BadFormat, "triangle index out of range");
  if (!closed_orientable()) fail(ErrorCode::OpenSurface, "mesh is not a closed orientable surface");

  centroid.resize(nt);
  normal.resize(nt);
  area.resize(nt);
  total_area = 0.0;
  for (int t = 0; t < nt; ++t) {
    const Vec3& v0 = vertices[triangles[t][0]];
    const Vec3& v1 = vertices[triangles[t][1]];
    const Vec3& v2 = vertices[triangles[t][2]];
    centroid[t] = (v0 + v1 + v2) / 3.0;
    const Vec3 cr = (v1 - v0).cross(v2 - v0);
    const double two_area = cr.norm();
    if (!(two_area > 0.0)) fail(ErrorCode::OpenSurface, "degenerate (zero-area) triangle");
    area[t] = 0.5 * two_area;
    normal[t] = cr / two_area;
    total_area += area[t];
  }
}

bool TriMesh::closed_orientable() const {
  // Every directed edge must appear exactly once, paired with its reverse.
  std::map<std::pair<int, int>, int> count;
  for (const auto& tri : triangles) {
    for (int e = 0; e < 3; ++e) {
      const int a = tri[e], b = tri[(e + 1) % 3];
      if (a == b) return false;
      if (++count[{a, b}] > 1) return false;
    }
  }
  for (const auto& [edge, c] : count) {
    auto rev = count.find({edge.second, edge.first});
    if (rev == count.end() || rev->second != 1) return false;
  }
  return true;
}

int TriMesh::euler_characteristic() const {
  std::map<std::pair<int, int>, bool> edges;
  for (const auto& tri : triangles)
    for (int e = 0; e < 3; ++e) {
      int a = tri[e], b = tri[(e + 1) % 3];
      edges[{std::min(a, b), std::max(a, b)}] = true;
    }
  return num_vertices() - static_cast<int>(edges.size()) + num_triangles();
}

double TriMesh::diameter() const {
  const int nv = num_vertices();
  double best = 0.0;
#pragma omp parallel for schedule(static) reduction(max : best)
  for (int i = 0; i < nv; ++i)
    for (int j = i + 1; j < nv; ++j) best = std::max(best, (vertices[i] - vertices[j]).squaredNorm());
  return std::sqrt(best);
}

TriMesh mesh_sphere(const Vec3& center, double radius, int level) {
  if (level < 0 || level > 6) fail(ErrorCode::LevelOutOfRange, "icosphere level must be in [0, 6]");
  if (!(radius > 0.0)) fail(ErrorCode::NonPositiveRadius, "sphere radius must be positive");

  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  TriMesh mesh;
  mesh.vertices = {
      {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t},  {0, 1, t},
      {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1},
  };
  for (auto& v : mesh.vertices) v.normalize();
  mesh.triangles = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9},  {5, 11, 4},
      {11, 10, 2}, {10, 7, 6}, {7, 1, 8},   {3, 9, 4},  {3, 4, 2},   {3, 2, 6},  {3, 6, 8},
      {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1},
  };

  for (int l = 0; l < level; ++l) {
    std::unordered_map<std::uint64_t, int> midpoint;
    auto mid = [&](int a, int b) {
      const std::uint64_t key =
          (static_cast<std::uint64_t>(std::min(a, b)) << 32) | static_cast<std::uint32_t>(std::max(a, b));
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      Vec3 m = (mesh.vertices[a] + mesh.vertices[b]).normalized();
      mesh.vertices.push_back(m);
      const int idx = mesh.num_vertices() - 1;
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(mesh.triangles.size() * 4);
    for (const auto& tri : mesh.triangles) {
      const int ab = mid(tri[0], tri[1]), bc = mid(tri[1], tri[2]), ca = mid(tri[2], tri[0]);
      next.push_back({tri[0], ab, ca});
      next.push_back({tri[1], bc, ab});
      next.push_back({tri[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    mesh.triangles = std::move(next);
  }

  for (auto& v : mesh.vertices) v = center + radius * v;
  mesh.finalize();
  if (mesh.euler_characteristic() != 2)
    fail(ErrorCode::OpenSurface, "generated sphere mesh is not genus 0");
  return mesh;
}

TriMesh scaled(const TriMesh& mesh, double factor) {
  if (!(factor > 0.0)) fail(ErrorCode::NonPositive, "scale factor must be positive");
  TriMesh out;
  out.vertices = mesh.vertices;
  for (auto& v : out.vertices) v *= factor;
  out.triangles = mesh.triangles;
  out.finalize();
  return out;
}

TriMesh translated(const TriMesh& mesh, const Vec3& shift) {
  TriMesh out;
  out.vertices = mesh.vertices;
  for (auto& v : out.vertices) v += shift;
  out.triangles = mesh.triangles;
  out.finalize();
  return out;
}

TriMesh read_off(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);
  std::string token;
  in >> token;
  if (token != "OFF") fail(ErrorCode::BadFormat, path + ": missing OFF header");
  long nv = 0, nf = 0, ne = 0;
  in >> nv >> nf >> ne;
  if (!in || nv <= 0 || nf <= 0) fail(ErrorCode::BadFormat, path + ": bad OFF counts");
  TriMesh mesh;
  mesh.vertices.resize(nv);
  for (long i = 0; i < nv; ++i) in >> mesh.vertices[i].x() >> mesh.vertices[i].y() >> mesh.vertices[i].z();
  mesh.triangles.reserve(nf);
  for (long f = 0; f < nf; ++f) {
    int arity = 0;
    in >> arity;
    if (arity != 3) fail(ErrorCode::BadFormat, path + ": only triangular faces supported");
    std::array<int, 3> tri{};
    in >> tri[0] >> tri[1] >> tri[2];
    mesh.triangles.push_back(tri);
  }
  if (!in) fail(ErrorCode::BadFormat, path + ": truncated OFF file");
  mesh.finalize();
  return mesh;
}

TriMesh read_stl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);
  char header[80];
  in.read(header, 80);
  std::uint32_t nt = 0;
  in.read(reinterpret_cast<char*>(&nt), 4);
  if (!in || nt == 0) fail(ErrorCode::BadFormat, path + ": bad binary STL header");

  TriMesh mesh;
  mesh.triangles.reserve(nt);
  // Weld vertices on exact float bit patterns.
  std::map<std::array<float, 3>, int> seen;
  auto vertex_index = [&](const std::array<float, 3>& key) {
    auto it = seen.find(key);
    if (it != seen.end()) return it->second;
    mesh.vertices.emplace_back(key[0], key[1], key[2]);
    const int idx = mesh.num_vertices() - 1;
    seen.emplace(key, idx);
    return idx;
  };
  for (std::uint32_t t = 0; t < nt; ++t) {
    float rec[12];
    std::uint16_t attr = 0;
    in.read(reinterpret_cast<char*>(rec), sizeof(rec));
    in.read(reinterpret_cast<char*>(&attr), 2);
    if (!in) fail(ErrorCode::BadFormat, path + ": truncated STL after " + std::to_string(t) + " facets");
    std::array<int, 3> tri{};
    for (int k = 0; k < 3; ++k) tri[k] = vertex_index({rec[3 + 3 * k], rec[4 + 3 * k], rec[5 + 3 * k]});
    mesh.triangles.push_back(tri);
  }
  mesh.finalize();
  return mesh;
}

TriMesh read_mesh(const std::string& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) fail(ErrorCode::IoError, "cannot open " + path);
  char magic[3] = {0, 0, 0};
  probe.read(magic, 3);
  probe.close();
  if (std::strncmp(magic, "OFF", 3) == 0) return read_off(path);
  return read_stl(path);
}

void write_off(const TriMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path);
  out << "OFF\n" << mesh.num_vertices() << ' ' << mesh.num_triangles() << " 0\n";
  out.precision(17);
  for (const auto& v : mesh.vertices) out << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& tri : mesh.triangles) out << "3 " << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
  if (!out) fail(ErrorCode::IoError, "write failed for " + path);
}

}  // namespace scatterlax
