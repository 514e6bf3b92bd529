#pragma once

#include <vector>

#include "scatterlax/directions.hpp"
#include "scatterlax/foldy.hpp"
#include "scatterlax/scene.hpp"
#include "scatterlax/trimesh.hpp"
#include "scatterlax/types.hpp"

namespace scatterlax {

// Piecewise-constant single-layer density on the union of obstacle meshes,
// solving S_kappa sigma = -u^inc on the boundary (sound-soft condition).
struct BemSolution {
  std::vector<int> offset;     // per-obstacle prefix into the panel arrays, size M+1
  std::vector<Vec3> centroid;  // panel centroids (collocation points)
  RVector area;
  CVector sigma;
  double residual = 0.0;  // max |A sigma + u^inc| over panels
  int level = 0;
  double kappa = 0.0;

  int panel_count() const { return static_cast<int>(area.size()); }
  int obstacle_count() const { return static_cast<int>(offset.size()) - 1; }
  // integral of sigma over obstacle m; tends to the point-interaction Q_m
  cplx total_charge(int m) const;
};

// Collocation matrix of the Helmholtz single-layer operator on the combined
// panel set. Diagonal entries split the kernel into the static 1/(4 pi r) part
// (subdivision + analytic flat-triangle integral) and the smooth remainder
// (e^{i k r} - 1)/(4 pi r) quadratured at the centroid. Off-diagonal entries
// use one-point centroid quadrature.
CMatrix slp_matrix(const std::vector<TriMesh>& meshes, double kappa);
CMatrix slp_matrix_serial(const std::vector<TriMesh>& meshes, double kappa);

BemSolution solve_slp(const Scene& scene, const Vec3& theta, int level);

// Far field (1/4pi) sum_t e^{-i k xhat . c_t} sigma_t area_t.
cplx oracle_far_field(const BemSolution& sol, const Vec3& xhat);

// Factorizes once and back-solves for every incidence direction.
ResponseMatrix bem_response_matrix(const Scene& scene, const DirectionSet& dirs, int level);

// Partial-wave series for the sound-soft sphere:
//   (i/kappa) sum_l (2l+1) (j_l(k rho)/h_l(k rho)) P_l(xhat . theta),
// which tends to -rho as kappa -> 0. kappa == 0 returns -rho exactly.
cplx exact_sphere_far_field(double radius, double kappa, const Vec3& xhat, const Vec3& theta,
                            int lmax = 40);

struct ApproximationError {
  double max_abs_err = 0.0;  // max_{j,l} |F_point - F_bem|
  double rel_err = 0.0;      // max_abs_err / max |F_bem|
  double budget = 0.0;       // a-priori bound from the scene geometry
};

ApproximationError approximation_error(const Scene& scene, const DirectionSet& dirs, int level);

}  // namespace scatterlax
