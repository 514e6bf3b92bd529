#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "scatterlax/trimesh.hpp"
#include "scatterlax/types.hpp"

namespace scatterlax {

struct Sphere {
  double radius;
};

// Scatterer described by a reference surface mesh scaled by `scale`:
// D = center + scale * B, with B the reference mesh.
struct MeshShape {
  std::string path;  // where the reference mesh came from (may be empty)
  double scale;
  std::shared_ptr<const TriMesh> mesh;
};

struct Scatterer {
  Vec3 center;
  std::variant<Sphere, MeshShape> shape;
  // Capacitance of the scatterer as placed (after scaling), convention C = 4*pi*rho.
  std::optional<double> capacitance_override;

  bool is_sphere() const { return std::holds_alternative<Sphere>(shape); }
  double radius() const;    // spheres only
  double diameter() const;  // 2*radius for spheres, scale * mesh diameter otherwise
};

Scatterer make_sphere(const Vec3& center, double radius,
                      std::optional<double> capacitance_override = std::nullopt);
Scatterer make_mesh_scatterer(const Vec3& center, std::shared_ptr<const TriMesh> mesh, double scale,
                              std::optional<double> capacitance_override = std::nullopt,
                              std::string path = {});

struct Scene {
  std::vector<Scatterer> scatterers;
  double kappa = 0.0;
  double kappa_max = 1.0;
  double d_max = 1.0;

  // Validates all scene invariants (disjointness, kappa range, d <= d_max).
  static Scene make(std::vector<Scatterer> scatterers, double kappa, double kappa_max, double d_max);

  int size() const { return static_cast<int>(scatterers.size()); }
};

// Validity thresholds; the defaults follow the artifact configuration
// a0 = 1/kappa_max, c0 = 0.1, c2 = 0.05, c_slp = 0.05.
struct Thresholds {
  double a0;
  double c0 = 0.1;
  double c2 = 0.05;
  double c_slp = 0.05;
};

Thresholds default_thresholds(const Scene& scene);

struct ValidityReport {
  double a = 0.0;
  double d = 0.0;  // +inf for M = 1
  int M = 0;
  bool regime_sqrt = false;    // sqrt(M-1) * a / d <= c0
  bool regime_linear = false;  // (M-1) * a / d <= c2
  bool regime_slp = false;     // (M-1) * a / d^2 <= c_slp
  bool size_ok = false;        // a <= a0
  double cos_condition = 1.0;  // min_{j != m} cos(kappa |z_m - z_j|); +1 for M = 1
  double capacitance_gap = 0.0;  // max_m C_m / ((5 pi / 3) d)
  double diag_dominance = 0.0;   // max_m sum_{j != m} C_m / |z_m - z_j|, compare to 4 pi
  Thresholds thresholds{};
};

// Surface-to-surface distance between two scatterers. Exact for sphere pairs;
// vertex-sampled when meshes are involved.
double surface_distance(const Scatterer& p, const Scatterer& q);

double compute_a(const Scene& scene);
double compute_d(const Scene& scene);  // throws SingleScatterer for M = 1

ValidityReport validate(const Scene& scene, const Thresholds& thresholds);
ValidityReport validate(const Scene& scene);

// Diagnostic magnitude M*kappa*a^2 + M(M-1)(kappa a^3/d + a^3/d^2)
//                    + M(M-1)^2 (a/d)(kappa a^3/d + a^3/d^2), with unit constant.
double error_budget(const Scene& scene);

// Deterministic scaling-study generator: M = round(a^-s) spheres of diameter a
// on a cubic lattice with nearest-neighbor surface gap a^t, filled in
// lexicographic order and recentred on the centroid.
Scene make_lattice_scene(double a, double t, double s, double kappa, int max_scatterers = 30);

}  // namespace scatterlax
