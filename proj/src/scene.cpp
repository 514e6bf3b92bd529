#include "scatterlax/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace scatterlax {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double Scatterer::radius() const {
  if (!is_sphere()) fail(ErrorCode::NonSphereScatterer, "radius() requires a sphere");
  return std::get<Sphere>(shape).radius;
}

double Scatterer::diameter() const {
  if (is_sphere()) return 2.0 * std::get<Sphere>(shape).radius;
  const auto& m = std::get<MeshShape>(shape);
  return m.scale * m.mesh->diameter();
}

Scatterer make_sphere(const Vec3& center, double radius, std::optional<double> capacitance_override) {
  if (!(radius > 0.0)) fail(ErrorCode::NonPositiveRadius, "sphere radius must be positive");
  return Scatterer{center, Sphere{radius}, capacitance_override};
}

Scatterer make_mesh_scatterer(const Vec3& center, std::shared_ptr<const TriMesh> mesh, double scale,
                              std::optional<double> capacitance_override, std::string path) {
  if (!(scale > 0.0)) fail(ErrorCode::NonPositive, "mesh scale must be positive");
  if (!mesh || mesh->num_triangles() == 0) fail(ErrorCode::OpenSurface, "mesh scatterer without a mesh");
  return Scatterer{center, MeshShape{std::move(path), scale, std::move(mesh)}, capacitance_override};
}

namespace {

// World-space vertices of a mesh scatterer.
std::vector<Vec3> world_vertices(const Scatterer& s) {
  const auto& m = std::get<MeshShape>(s.shape);
  std::vector<Vec3> out;
  out.reserve(m.mesh->vertices.size());
  for (const auto& v : m.mesh->vertices) out.push_back(s.center + m.scale * v);
  return out;
}

}  // namespace

double surface_distance(const Scatterer& p, const Scatterer& q) {
  if (p.is_sphere() && q.is_sphere())
    return (p.center - q.center).norm() - p.radius() - q.radius();
  if (p.is_sphere() || q.is_sphere()) {
    const Scatterer& sph = p.is_sphere() ? p : q;
    const Scatterer& msh = p.is_sphere() ? q : p;
    double best = kInf;
    for (const auto& v : world_vertices(msh)) best = std::min(best, (v - sph.center).norm());
    return best - sph.radius();
  }
  double best = kInf;
  const auto pv = world_vertices(p);
  const auto qv = world_vertices(q);
  for (const auto& a : pv)
    for (const auto& b : qv) best = std::min(best, (a - b).squaredNorm());
  return std::sqrt(best);
}

Scene Scene::make(std::vector<Scatterer> scatterers, double kappa, double kappa_max, double d_max) {
  if (scatterers.empty()) fail(ErrorCode::InvalidScene, "scene needs at least one scatterer");
  if (!(kappa >= 0.0)) fail(ErrorCode::InvalidScene, "kappa must be >= 0");
  if (!(kappa_max > 0.0)) fail(ErrorCode::InvalidScene, "kappa_max must be positive");
  if (!(d_max > 0.0)) fail(ErrorCode::InvalidScene, "d_max must be positive");
  if (kappa > kappa_max) fail(ErrorCode::InvalidScene, "kappa exceeds kappa_max");

  Scene scene{std::move(scatterers), kappa, kappa_max, d_max};
  if (scene.size() >= 2) {
    const double d = compute_d(scene);
    if (!(d > 0.0)) fail(ErrorCode::InvalidScene, "scatterers must be pairwise disjoint");
    if (d > d_max) fail(ErrorCode::InvalidScene, "minimum surface distance exceeds d_max");
  }
  return scene;
}

double compute_a(const Scene& scene) {
  double a = 0.0;
  for (const auto& s : scene.scatterers) a = std::max(a, s.diameter());
  return a;
}

double compute_d(const Scene& scene) {
  if (scene.size() < 2)
    fail(ErrorCode::SingleScatterer, "d is undefined for a single scatterer");
  double d = kInf;
  for (int m = 0; m < scene.size(); ++m)
    for (int j = m + 1; j < scene.size(); ++j)
      d = std::min(d, surface_distance(scene.scatterers[m], scene.scatterers[j]));
  return d;
}

Thresholds default_thresholds(const Scene& scene) {
  return Thresholds{1.0 / scene.kappa_max, 0.1, 0.05, 0.05};
}

// Defined in capacitance.cpp; declared here to avoid a header cycle.
std::vector<double> resolve_capacitances(const Scene& scene);

ValidityReport validate(const Scene& scene, const Thresholds& thresholds) {
  ValidityReport r;
  r.M = scene.size();
  r.a = compute_a(scene);
  r.d = r.M >= 2 ? compute_d(scene) : kInf;
  r.thresholds = thresholds;
  r.size_ok = r.a <= thresholds.a0;

  const auto caps = resolve_capacitances(scene);
  const double max_cap = *std::max_element(caps.begin(), caps.end());

  if (r.M == 1) {
    r.regime_sqrt = r.regime_linear = r.regime_slp = true;
    r.cos_condition = 1.0;
    r.capacitance_gap = 0.0;
    r.diag_dominance = 0.0;
    return r;
  }

  const double m1 = static_cast<double>(r.M - 1);
  r.regime_sqrt = std::sqrt(m1) * r.a / r.d <= thresholds.c0;
  r.regime_linear = m1 * r.a / r.d <= thresholds.c2;
  r.regime_slp = m1 * r.a / (r.d * r.d) <= thresholds.c_slp;

  double t = 1.0;
  double dominance = 0.0;
  for (int m = 0; m < r.M; ++m) {
    double row = 0.0;
    for (int j = 0; j < r.M; ++j) {
      if (j == m) continue;
      const double dist = (scene.scatterers[m].center - scene.scatterers[j].center).norm();
      t = std::min(t, std::cos(scene.kappa * dist));
      row += caps[m] / dist;
    }
    dominance = std::max(dominance, row);
  }
  r.cos_condition = t;
  r.capacitance_gap = max_cap / ((5.0 * kPi / 3.0) * r.d);
  r.diag_dominance = dominance;
  return r;
}

ValidityReport validate(const Scene& scene) { return validate(scene, default_thresholds(scene)); }

double error_budget(const Scene& scene) {
  const double M = scene.size();
  const double a = compute_a(scene);
  const double kappa = scene.kappa;
  if (scene.size() == 1) return M * kappa * a * a;
  const double d = compute_d(scene);
  const double interact = kappa * a * a * a / d + a * a * a / (d * d);
  return M * kappa * a * a + M * (M - 1.0) * interact + M * (M - 1.0) * (M - 1.0) * (a / d) * interact;
}

Scene make_lattice_scene(double a, double t, double s, double kappa, int max_scatterers) {
  if (!(a > 0.0)) fail(ErrorCode::NonPositive, "lattice sphere diameter must be positive");
  const int m = std::max(1, static_cast<int>(std::llround(std::pow(a, -s))));
  if (m > max_scatterers) {
    fail(ErrorCode::TooManyScatterers, "scaling study would need " + std::to_string(m) +
                                           " scatterers (cap " + std::to_string(max_scatterers) +
                                           ")");
  }
  const double gap = std::pow(a, t);
  const double pitch = a + gap;
  const int n = static_cast<int>(std::ceil(std::cbrt(static_cast<double>(m))));
  std::vector<Vec3> sites;
  sites.reserve(m);
  for (int i = 0; i < n && static_cast<int>(sites.size()) < m; ++i) {
    for (int j = 0; j < n && static_cast<int>(sites.size()) < m; ++j) {
      for (int k = 0; k < n && static_cast<int>(sites.size()) < m; ++k) {
        sites.emplace_back(pitch * i, pitch * j, pitch * k);
      }
    }
  }
  Vec3 centroid = Vec3::Zero();
  for (const Vec3& p : sites) centroid += p;
  centroid /= static_cast<double>(m);
  std::vector<Scatterer> scatterers;
  scatterers.reserve(m);
  for (const Vec3& p : sites) scatterers.push_back(make_sphere(p - centroid, 0.5 * a));
  const double d_max = std::max(gap * 1.001, 2.0 * pitch * (n + 1.0));
  return Scene::make(std::move(scatterers), kappa, std::max(kappa, 1.0), d_max);
}

}  // namespace scatterlax
