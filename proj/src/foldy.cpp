#include "scatterlax/foldy.hpp"

#include <cmath>
#include <limits>

#include "scatterlax/capacitance.hpp"
#include "scatterlax/parallel.hpp"

namespace scatterlax {

cplx helmholtz_kernel(double kappa, const Vec3& x, const Vec3& y) {
  const double r = (x - y).norm();
  return std::exp(cplx(0.0, kappa * r)) / (kFourPi * r);
}

namespace {

FoldySystem build_system(std::vector<Vec3> centers, RVector caps, double kappa,
                         double min_surface_distance) {
  const int m = static_cast<int>(centers.size());
  if (m == 0) fail(ErrorCode::InvalidScene, "system needs at least one scatterer");
  if (caps.size() != m) fail(ErrorCode::InvalidScene, "capacitance count does not match centers");
  for (int i = 0; i < m; ++i) {
    if (!(caps[i] > 0.0)) fail(ErrorCode::NonPositive, "capacitance must be positive");
  }
  FoldySystem sys;
  sys.centers = std::move(centers);
  sys.capacitances = std::move(caps);
  sys.kappa = kappa;
  sys.min_surface_distance = min_surface_distance;
  sys.B = CMatrix::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    sys.B(i, i) = cplx(-1.0 / sys.capacitances[i], 0.0);
    for (int j = i + 1; j < m; ++j) {
      const double r = (sys.centers[i] - sys.centers[j]).norm();
      if (r == 0.0) fail(ErrorCode::CoincidentCenters, "two scatterer centers coincide");
      const cplx phi = -helmholtz_kernel(kappa, sys.centers[i], sys.centers[j]);
      sys.B(i, j) = phi;
      sys.B(j, i) = phi;
    }
  }
  sys.lu.compute(sys.B);
  return sys;
}

}  // namespace

FoldySystem assemble(const Scene& scene) {
  std::vector<Vec3> centers;
  centers.reserve(scene.scatterers.size());
  for (const Scatterer& s : scene.scatterers) centers.push_back(s.center);
  const std::vector<double> resolved = resolve_capacitances(scene);
  const RVector caps = Eigen::Map<const RVector>(resolved.data(), resolved.size());
  const double d = scene.scatterers.size() > 1 ? compute_d(scene)
                                               : std::numeric_limits<double>::infinity();
  return build_system(std::move(centers), caps, scene.kappa, d);
}

FoldySystem assemble_points(const std::vector<Vec3>& centers, const RVector& capacitances,
                            double kappa, double min_surface_distance) {
  return build_system(centers, capacitances, kappa, min_surface_distance);
}

CVector incident_trace(const FoldySystem& sys, const Vec3& theta) {
  const int m = sys.size();
  CVector u(m);
  for (int i = 0; i < m; ++i) {
    u[i] = std::exp(cplx(0.0, sys.kappa * sys.centers[i].dot(theta)));
  }
  return u;
}

CVector solve_system(const FoldySystem& sys, const CVector& rhs) {
  CVector q = sys.lu.solve(rhs);
  const double scale = rhs.lpNorm<Eigen::Infinity>();
  const double tol = 1e-10 * (scale > 0.0 ? scale : 1.0);
  double res = (sys.B * q - rhs).lpNorm<Eigen::Infinity>();
  if (!(res <= tol)) {  // negated so a NaN residual lands here too
    q += sys.lu.solve(rhs - sys.B * q);  // one refinement pass
    res = (sys.B * q - rhs).lpNorm<Eigen::Infinity>();
    if (!(res <= tol)) {
      fail(ErrorCode::SingularMatrix, "point-interaction system is numerically singular (residual " +
                                          std::to_string(res) + ")");
    }
  }
  return q;
}

ChargeVector solve_charges(const FoldySystem& sys, const Vec3& theta) {
  ChargeVector out;
  out.incident_direction = theta;
  out.Q = solve_system(sys, incident_trace(sys, theta));
  return out;
}

cplx far_field(const FoldySystem& sys, const CVector& Q, const Vec3& xhat) {
  cplx acc(0.0, 0.0);
  for (int m = 0; m < sys.size(); ++m) {
    acc += std::exp(cplx(0.0, -sys.kappa * xhat.dot(sys.centers[m]))) * Q[m];
  }
  return acc / kFourPi;
}

cplx born_far_field(const FoldySystem& sys, const Vec3& xhat, const Vec3& theta) {
  cplx acc(0.0, 0.0);
  for (int m = 0; m < sys.size(); ++m) {
    const cplx q = -sys.capacitances[m] * std::exp(cplx(0.0, sys.kappa * sys.centers[m].dot(theta)));
    acc += std::exp(cplx(0.0, -sys.kappa * xhat.dot(sys.centers[m]))) * q;
  }
  return acc / kFourPi;
}

namespace {

template <bool Parallel>
ResponseMatrix response_matrix_impl(const FoldySystem& sys, const DirectionSet& dirs) {
  const int n = dirs.size();
  if (n == 0) fail(ErrorCode::DegreeTooSmall, "empty direction set");
  ResponseMatrix out;
  out.d_gl = dirs.d_gl;
  out.kappa = sys.kappa;
  out.F.resize(n, n);
  int bad_col = -1;
#pragma omp parallel for schedule(static) num_threads(max_threads()) if (Parallel)
  for (int l = 0; l < n; ++l) {
    const CVector rhs = incident_trace(sys, dirs.directions[l]);
    const CVector q = sys.lu.solve(rhs);
    const double scale = rhs.lpNorm<Eigen::Infinity>();
    if (!((sys.B * q - rhs).lpNorm<Eigen::Infinity>() <= 1e-10 * scale)) {
#pragma omp critical
      bad_col = l;
      continue;
    }
    for (int j = 0; j < n; ++j) {
      out.F(j, l) = far_field(sys, q, dirs.directions[j]);
    }
  }
  if (bad_col >= 0) {
    fail(ErrorCode::SingularMatrix,
         "point-interaction solve failed for incidence column " + std::to_string(bad_col));
  }
  return out;
}

}  // namespace

ResponseMatrix response_matrix(const FoldySystem& sys, const DirectionSet& dirs) {
  return response_matrix_impl<true>(sys, dirs);
}

ResponseMatrix response_matrix_serial(const FoldySystem& sys, const DirectionSet& dirs) {
  return response_matrix_impl<false>(sys, dirs);
}

MazyaReport verify_mazya_bound(const FoldySystem& sys, const CVector& rhs) {
  MazyaReport rep;
  const int m = sys.size();
  rep.max_capacitance = sys.capacitances.maxCoeff();
  rep.capacitance_threshold = (5.0 * kPi / 3.0) * sys.min_surface_distance;
  rep.t = 1.0;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const double r = (sys.centers[i] - sys.centers[j]).norm();
      rep.t = std::min(rep.t, std::cos(sys.kappa * r));
    }
  }
  const bool size_ok = std::isinf(sys.min_surface_distance)
                           ? true
                           : rep.max_capacitance < rep.capacitance_threshold;
  if (!size_ok || rep.t < 0.0) {
    rep.status = MazyaStatus::NotApplicable;
    return rep;
  }
  const CVector Q = solve_system(sys, rhs);
  rep.lhs = 0.0;
  double rhs_sum = 0.0;
  for (int i = 0; i < m; ++i) {
    rep.lhs += std::norm(Q[i]) / sys.capacitances[i];
    rhs_sum += std::norm(rhs[i]) * sys.capacitances[i];
  }
  const double ratio = std::isinf(sys.min_surface_distance)
                           ? 0.0
                           : 3.0 * rep.t * rep.max_capacitance /
                                 (5.0 * kPi * sys.min_surface_distance);
  const double factor = 1.0 / ((1.0 - ratio) * (1.0 - ratio));
  rep.rhs_bound = 4.0 * factor * rhs_sum;
  rep.status = rep.lhs <= rep.rhs_bound ? MazyaStatus::Holds : MazyaStatus::Violated;
  return rep;
}

double diag_dominance_margin(const FoldySystem& sys) {
  const int m = sys.size();
  double margin = 0.0;
  for (int i = 0; i < m; ++i) {
    double row = 0.0;
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      row += 1.0 / (sys.centers[i] - sys.centers[j]).norm();
    }
    margin = std::max(margin, sys.capacitances[i] * row);
  }
  return margin;
}

JacobiResult jacobi_solve(const FoldySystem& sys, const CVector& rhs, int max_iter, double tol) {
  const int m = sys.size();
  JacobiResult out;
  out.Q = CVector::Zero(m);
  CVector next(m);
  for (int it = 1; it <= max_iter; ++it) {
    for (int i = 0; i < m; ++i) {
      cplx coupling(0.0, 0.0);
      for (int j = 0; j < m; ++j) {
        if (j == i) continue;
        // off-diagonal of B is -Phi, so -B(i,j) restores the kernel value
        coupling += -sys.B(i, j) * out.Q[j];
      }
      next[i] = -sys.capacitances[i] * (rhs[i] + coupling);
    }
    const double delta = (next - out.Q).lpNorm<Eigen::Infinity>();
    out.Q.swap(next);
    out.iterations = it;
    if (delta <= tol * std::max(1.0, out.Q.lpNorm<Eigen::Infinity>())) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace scatterlax
