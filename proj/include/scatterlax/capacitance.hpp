#pragma once

#include <vector>

#include "scatterlax/scene.hpp"
#include "scatterlax/trimesh.hpp"
#include "scatterlax/types.hpp"

namespace scatterlax {

struct CapacitanceResult {
  double capacitance = 0.0;
  std::vector<double> density;  // per-triangle sigma
  double residual = 0.0;        // max over collocation points of |S0 sigma - 1|
};

// C = 4*pi*radius.
double sphere_capacitance(double radius);

// Radius of the equivalent sphere, C / (4*pi).
double radius_from_capacitance(double capacitance);

// Analytic integral of 1/|p - y| over the flat triangle (a, b, c) for a point p
// lying in the triangle's plane.
double tri_integral_inv_r(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

// Self integral of 1/|centroid - y| over a triangle: 4-way midpoint subdivision,
// the singular (medial) sub-triangle integrated analytically, the three corner
// sub-triangles by centroid quadrature.
double self_integral_inv_r(const Vec3& collocation, const Vec3& a, const Vec3& b, const Vec3& c);

// Collocation matrix of the electrostatic single-layer operator,
// A_{tt'} = (1/4pi) * integral over triangle t' of 1/|c_t - s| ds.
RMatrix slp0_matrix(const TriMesh& mesh);
RMatrix slp0_matrix_serial(const TriMesh& mesh);  // reference implementation

// Solves A sigma = 1 and integrates the density; convention C_sphere = 4*pi*rho.
CapacitanceResult mesh_capacitance(const TriMesh& mesh);

// J = double integral of |s - t|^{-1} over the surface, by the same quadrature
// as the collocation matrix; used for the lower bound C >= 4*pi*|dB|^2 / J.
double slp_interaction_integral(const TriMesh& mesh);

// Per-scatterer capacitances: override if present, 4*pi*rho for spheres,
// otherwise CapacitanceUnavailable (mesh scatterers need a precomputed value).
std::vector<double> resolve_capacitances(const Scene& scene);

}  // namespace scatterlax
