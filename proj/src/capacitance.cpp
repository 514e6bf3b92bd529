#include "scatterlax/capacitance.hpp"

#include <cmath>

#include "scatterlax/parallel.hpp"

namespace scatterlax {

double sphere_capacitance(double radius) {
  if (!(radius > 0.0)) fail(ErrorCode::NonPositiveRadius, "radius must be positive");
  return kFourPi * radius;
}

double radius_from_capacitance(double capacitance) {
  if (!(capacitance > 0.0)) fail(ErrorCode::NonPositive, "capacitance must be positive");
  return capacitance / kFourPi;
}

double tri_integral_inv_r(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  // Edge decomposition of the in-plane Newtonian potential of a flat triangle:
  //   I = sum over edges (A,B) of delta * log((R_B + l_B) / (R_A + l_A)),
  // delta the in-plane signed distance from p to the edge line.
  const Vec3 n = (b - a).cross(c - a).normalized();
  const Vec3 verts[4] = {a, b, c, a};
  double total = 0.0;
  for (int e = 0; e < 3; ++e) {
    const Vec3& A = verts[e];
    const Vec3& B = verts[e + 1];
    const Vec3 tangent = (B - A).normalized();
    const double delta = (A - p).dot(tangent.cross(n));
    const double lA = (A - p).dot(tangent), lB = (B - p).dot(tangent);
    const double RA = (A - p).norm(), RB = (B - p).norm();
    const double num = RB + lB, den = RA + lA;
    if (num <= 0.0 || den <= 0.0) continue;  // p on the edge line; zero-measure contribution
    total += delta * std::log(num / den);
  }
  return total;
}

double self_integral_inv_r(const Vec3& collocation, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = 0.5 * (a + b), bc = 0.5 * (b + c), ca = 0.5 * (c + a);
  double total = tri_integral_inv_r(collocation, ab, bc, ca);
  const Vec3 corners[3][3] = {{a, ab, ca}, {b, bc, ab}, {c, ca, bc}};
  for (const auto& tri : corners) {
    const Vec3 cen = (tri[0] + tri[1] + tri[2]) / 3.0;
    const double area = 0.5 * (tri[1] - tri[0]).cross(tri[2] - tri[0]).norm();
    total += area / (cen - collocation).norm();
  }
  return total;
}

namespace {

template <bool Parallel>
RMatrix slp0_matrix_impl(const TriMesh& mesh) {
  const int n = mesh.num_triangles();
  RMatrix A(n, n);
#pragma omp parallel for schedule(static) num_threads(max_threads()) if (Parallel)
  for (int t = 0; t < n; ++t) {
    const Vec3& x = mesh.centroid[t];
    for (int s = 0; s < n; ++s) {
      if (s == t) {
        const auto tri = mesh.triangle_vertices(t);
        A(t, t) = self_integral_inv_r(x, tri[0], tri[1], tri[2]) / kFourPi;
      } else {
        A(t, s) = mesh.area[s] / (kFourPi * (x - mesh.centroid[s]).norm());
      }
    }
  }
  return A;
}

}  // namespace

RMatrix slp0_matrix(const TriMesh& mesh) { return slp0_matrix_impl<true>(mesh); }
RMatrix slp0_matrix_serial(const TriMesh& mesh) { return slp0_matrix_impl<false>(mesh); }

CapacitanceResult mesh_capacitance(const TriMesh& mesh) {
  const int n = mesh.num_triangles();
  if (n < 32) fail(ErrorCode::MeshTooCoarse, "capacitance solver needs >= 32 triangles");

  const RMatrix A = slp0_matrix(mesh);
  const RVector rhs = RVector::Ones(n);
  Eigen::PartialPivLU<RMatrix> lu(A);
  RVector sigma = lu.solve(rhs);
  const double residual = (A * sigma - rhs).cwiseAbs().maxCoeff();
  if (!std::isfinite(residual) || residual > 1e-8)
    fail(ErrorCode::SingularSystem, "collocation system numerically singular (residual " +
                                        std::to_string(residual) + ")");

  CapacitanceResult result;
  result.density.assign(sigma.data(), sigma.data() + n);
  result.residual = residual;
  for (int t = 0; t < n; ++t) result.capacitance += sigma[t] * mesh.area[t];
  return result;
}

double slp_interaction_integral(const TriMesh& mesh) {
  const RMatrix A = slp0_matrix(mesh);
  const int n = mesh.num_triangles();
  double J = 0.0;
  for (int t = 0; t < n; ++t) J += kFourPi * mesh.area[t] * A.row(t).sum();
  return J;
}

std::vector<double> resolve_capacitances(const Scene& scene) {
  std::vector<double> caps;
  caps.reserve(scene.scatterers.size());
  for (const auto& s : scene.scatterers) {
    if (s.capacitance_override) {
      if (!(*s.capacitance_override > 0.0))
        fail(ErrorCode::NonPositive, "capacitance override must be positive");
      caps.push_back(*s.capacitance_override);
    } else if (s.is_sphere()) {
      caps.push_back(sphere_capacitance(s.radius()));
    } else {
      fail(ErrorCode::CapacitanceUnavailable,
           "mesh scatterer has no capacitance; compute one and set it on the scene");
    }
  }
  return caps;
}

}  // namespace scatterlax
