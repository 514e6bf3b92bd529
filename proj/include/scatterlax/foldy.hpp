#pragma once

#include <Eigen/LU>
#include <cstdint>
#include <optional>
#include <vector>

#include "scatterlax/directions.hpp"
#include "scatterlax/scene.hpp"
#include "scatterlax/types.hpp"

namespace scatterlax {

// Free-space kernel e^{i k |x-y|} / (4 pi |x-y|).
cplx helmholtz_kernel(double kappa, const Vec3& x, const Vec3& y);

// Point-interaction system: B is complex symmetric with diagonal -1/C_m and
// off-diagonal -Phi_kappa(z_m, z_j).
struct FoldySystem {
  CMatrix B;
  RVector capacitances;
  std::vector<Vec3> centers;
  double kappa = 0.0;
  // Smallest surface-to-surface separation (inf for a single obstacle); used
  // by the energy-bound certificate below.
  double min_surface_distance = 0.0;
  Eigen::PartialPivLU<CMatrix> lu;

  int size() const { return static_cast<int>(centers.size()); }
};

struct ChargeVector {
  CVector Q;
  Vec3 incident_direction;
};

struct ResponseMatrix {
  CMatrix F;  // rows: observation directions, cols: incidence directions
  int d_gl = 0;
  double kappa = 0.0;
  std::optional<double> snr_db;
  std::optional<std::uint64_t> seed;
};

FoldySystem assemble(const Scene& scene);
FoldySystem assemble_points(const std::vector<Vec3>& centers, const RVector& capacitances,
                            double kappa, double min_surface_distance);

// Incident plane-wave trace at the centers: U_m = e^{i kappa z_m . theta}.
CVector incident_trace(const FoldySystem& sys, const Vec3& theta);

// Solves B Q = U^I; verifies the residual to 1e-10 * ||U^I||_inf with one
// refinement pass before giving up.
ChargeVector solve_charges(const FoldySystem& sys, const Vec3& theta);
CVector solve_system(const FoldySystem& sys, const CVector& rhs);

// Far-field pattern (1/4pi) sum_m e^{-i kappa xhat . z_m} Q_m.
cplx far_field(const FoldySystem& sys, const CVector& Q, const Vec3& xhat);

// Leading-order (single-interaction) pattern with Q_m = -C_m U^I_m.
cplx born_far_field(const FoldySystem& sys, const Vec3& xhat, const Vec3& theta);

// F[j][l] = far_field(dirs[j]; incidence dirs[l]). Parallel over incidence
// columns; the _serial variant is the plain reference loop.
ResponseMatrix response_matrix(const FoldySystem& sys, const DirectionSet& dirs);
ResponseMatrix response_matrix_serial(const FoldySystem& sys, const DirectionSet& dirs);

enum class MazyaStatus { Holds, Violated, NotApplicable };

// Energy bound sum |Q_m|^2 / C_m <= 4 (1 - 3 t cmax / (5 pi d))^-2 sum |U_m|^2 C_m,
// valid when cmax < (5 pi / 3) d and t = min_{m != j} cos(kappa |z_m - z_j|) >= 0.
struct MazyaReport {
  MazyaStatus status = MazyaStatus::NotApplicable;
  double lhs = 0.0;
  double rhs_bound = 0.0;
  double t = 1.0;
  double max_capacitance = 0.0;
  double capacitance_threshold = 0.0;  // (5 pi / 3) * d

  bool holds() const { return status == MazyaStatus::Holds; }
  bool applicable() const { return status != MazyaStatus::NotApplicable; }
};

MazyaReport verify_mazya_bound(const FoldySystem& sys, const CVector& rhs);

// max_m sum_{j != m} C_m / |z_m - z_j|; < 4 pi certifies unique solvability,
// < 2 pi guarantees convergence of the Jacobi sweep below.
double diag_dominance_margin(const FoldySystem& sys);

struct JacobiResult {
  CVector Q;
  int iterations = 0;
  bool converged = false;
};

JacobiResult jacobi_solve(const FoldySystem& sys, const CVector& rhs, int max_iter = 200,
                          double tol = 1e-12);

}  // namespace scatterlax
