#include "scatterlax/bem.hpp"

#include <cmath>
#include <vector>

#include "scatterlax/capacitance.hpp"
#include "scatterlax/parallel.hpp"

namespace scatterlax {

namespace {

constexpr int kMaxUnknowns = 20000;

struct PanelSet {
  std::vector<int> offset;
  std::vector<Vec3> centroid;
  std::vector<std::array<Vec3, 3>> verts;
  RVector area;
};

PanelSet flatten(const std::vector<TriMesh>& meshes) {
  PanelSet p;
  int total = 0;
  p.offset.push_back(0);
  for (const TriMesh& m : meshes) {
    total += m.num_triangles();
    p.offset.push_back(total);
  }
  p.centroid.reserve(total);
  p.verts.reserve(total);
  p.area.resize(total);
  int idx = 0;
  for (const TriMesh& m : meshes) {
    for (int t = 0; t < m.num_triangles(); ++t, ++idx) {
      p.centroid.push_back(m.centroid[t]);
      p.verts.push_back(m.triangle_vertices(t));
      p.area[idx] = m.area[t];
    }
  }
  return p;
}

template <bool Parallel>
CMatrix slp_matrix_impl(const PanelSet& p, double kappa) {
  const int n = static_cast<int>(p.centroid.size());
  CMatrix a(n, n);
#pragma omp parallel for schedule(static) num_threads(max_threads()) if (Parallel)
  for (int t = 0; t < n; ++t) {
    for (int s = 0; s < n; ++s) {
      if (s == t) continue;
      const double r = (p.centroid[t] - p.centroid[s]).norm();
      a(t, s) = p.area[s] * std::exp(cplx(0.0, kappa * r)) / (kFourPi * r);
    }
    const double static_part =
        self_integral_inv_r(p.centroid[t], p.verts[t][0], p.verts[t][1], p.verts[t][2]) / kFourPi;
    // (e^{i k r} - 1)/(4 pi r) -> i k / (4 pi) as r -> 0
    a(t, t) = cplx(static_part, kappa * p.area[t] / kFourPi);
  }
  return a;
}

std::vector<TriMesh> scene_meshes(const Scene& scene, int level) {
  const int m = static_cast<int>(scene.scatterers.size());
  long long unknowns = 0;
  std::vector<TriMesh> meshes;
  meshes.reserve(m);
  for (const Scatterer& s : scene.scatterers) {
    if (!s.is_sphere()) {
      fail(ErrorCode::NonSphereScatterer, "reference solver accepts sphere scatterers only");
    }
  }
  // keep kappa_max away from the lowest interior Dirichlet eigenvalue
  const double size_cap = std::cbrt(kFourPi / 3.0) * kPi / scene.kappa_max;
  const double a = compute_a(scene);
  if (a >= size_cap) {
    fail(ErrorCode::ResonanceRisk, "obstacle size " + std::to_string(a) +
                                       " risks an interior resonance below kappa_max (cap " +
                                       std::to_string(size_cap) + ")");
  }
  for (const Scatterer& s : scene.scatterers) {
    meshes.push_back(mesh_sphere(s.center, std::get<Sphere>(s.shape).radius, level));
    unknowns += meshes.back().num_triangles();
    if (unknowns > kMaxUnknowns) {
      fail(ErrorCode::SystemTooLarge, "discretization exceeds " + std::to_string(kMaxUnknowns) +
                                          " unknowns; lower the refinement level");
    }
  }
  return meshes;
}

struct BemOperator {
  PanelSet panels;
  CMatrix A;
  Eigen::PartialPivLU<CMatrix> lu;
  int level = 0;
  double kappa = 0.0;
};

BemOperator build_operator(const Scene& scene, int level) {
  BemOperator op;
  op.panels = flatten(scene_meshes(scene, level));
  op.level = level;
  op.kappa = scene.kappa;
  op.A = slp_matrix_impl<true>(op.panels, scene.kappa);
  op.lu.compute(op.A);
  return op;
}

CVector incident_on_panels(const BemOperator& op, const Vec3& theta) {
  const int n = static_cast<int>(op.panels.centroid.size());
  CVector u(n);
  for (int t = 0; t < n; ++t) {
    u[t] = std::exp(cplx(0.0, op.kappa * op.panels.centroid[t].dot(theta)));
  }
  return u;
}

// Solves A sigma = -u and enforces the boundary-condition residual.
CVector solve_operator(const BemOperator& op, const CVector& u, double* residual_out) {
  CVector sigma = op.lu.solve(-u);
  const double tol = 1e-8 * u.lpNorm<Eigen::Infinity>();
  double res = (op.A * sigma + u).lpNorm<Eigen::Infinity>();
  if (!(res <= tol)) {  // negated so a NaN residual lands here too
    sigma += op.lu.solve(-u - op.A * sigma);
    res = (op.A * sigma + u).lpNorm<Eigen::Infinity>();
    if (!(res <= tol)) {
      fail(ErrorCode::SingularSystem,
           "boundary system residual " + std::to_string(res) + " exceeds tolerance");
    }
  }
  if (residual_out) *residual_out = res;
  return sigma;
}

BemSolution make_solution(const BemOperator& op, CVector sigma, double residual) {
  BemSolution sol;
  sol.offset = op.panels.offset;
  sol.centroid = op.panels.centroid;
  sol.area = op.panels.area;
  sol.sigma = std::move(sigma);
  sol.residual = residual;
  sol.level = op.level;
  sol.kappa = op.kappa;
  return sol;
}

}  // namespace

cplx BemSolution::total_charge(int m) const {
  if (m < 0 || m >= obstacle_count()) fail(ErrorCode::InvalidScene, "obstacle index out of range");
  cplx q(0.0, 0.0);
  for (int t = offset[m]; t < offset[m + 1]; ++t) q += sigma[t] * area[t];
  return q;
}

CMatrix slp_matrix(const std::vector<TriMesh>& meshes, double kappa) {
  return slp_matrix_impl<true>(flatten(meshes), kappa);
}

CMatrix slp_matrix_serial(const std::vector<TriMesh>& meshes, double kappa) {
  return slp_matrix_impl<false>(flatten(meshes), kappa);
}

BemSolution solve_slp(const Scene& scene, const Vec3& theta, int level) {
  const BemOperator op = build_operator(scene, level);
  double res = 0.0;
  CVector sigma = solve_operator(op, incident_on_panels(op, theta), &res);
  return make_solution(op, std::move(sigma), res);
}

cplx oracle_far_field(const BemSolution& sol, const Vec3& xhat) {
  cplx acc(0.0, 0.0);
  for (int t = 0; t < sol.panel_count(); ++t) {
    acc += std::exp(cplx(0.0, -sol.kappa * xhat.dot(sol.centroid[t]))) * sol.sigma[t] * sol.area[t];
  }
  return acc / kFourPi;
}

ResponseMatrix bem_response_matrix(const Scene& scene, const DirectionSet& dirs, int level) {
  const BemOperator op = build_operator(scene, level);
  const int n = dirs.size();
  const int panels = static_cast<int>(op.panels.centroid.size());
  ResponseMatrix out;
  out.d_gl = dirs.d_gl;
  out.kappa = scene.kappa;
  out.F.resize(n, n);
  // precompute observation phases once: ph(j, t) = e^{-i k xhat_j . c_t}
  CMatrix ph(n, panels);
  for (int j = 0; j < n; ++j) {
    for (int t = 0; t < panels; ++t) {
      ph(j, t) = std::exp(cplx(0.0, -scene.kappa * dirs.directions[j].dot(op.panels.centroid[t]))) *
                 op.panels.area[t];
    }
  }
  for (int l = 0; l < n; ++l) {
    const CVector sigma = solve_operator(op, incident_on_panels(op, dirs.directions[l]), nullptr);
    out.F.col(l) = ph * sigma / kFourPi;
  }
  return out;
}

cplx exact_sphere_far_field(double radius, double kappa, const Vec3& xhat, const Vec3& theta,
                            int lmax) {
  if (radius <= 0.0) fail(ErrorCode::NonPositiveRadius, "sphere radius must be positive");
  if (kappa == 0.0) return cplx(-radius, 0.0);
  if (lmax < 0 || lmax > 60) {
    fail(ErrorCode::SeriesNotConverged, "series order must lie in [0, 60]");
  }
  const double x = kappa * radius;
  if (!(x < 0.5 * lmax)) {
    fail(ErrorCode::SeriesNotConverged,
         "kappa*rho = " + std::to_string(x) + " too large for series order " + std::to_string(lmax));
  }

  // j_l by downward (Miller) recurrence with rescaling, y_l upward; both stable.
  const int lstart = lmax + 16 + static_cast<int>(x);
  std::vector<double> j(lmax + 1, 0.0);
  {
    double jp1 = 0.0, jc = 1e-30;
    for (int l = lstart; l >= 0; --l) {
      const double jm1 = (2.0 * l + 3.0) / x * jc - jp1;
      jp1 = jc;
      jc = jm1;
      if (l <= lmax) j[l] = jc;
      if (std::abs(jc) > 1e250) {  // rescale the whole tail to avoid overflow
        jp1 /= 1e250;
        jc /= 1e250;
        for (int k = l; k <= lmax; ++k) j[k] /= 1e250;
      }
    }
    const double scale = (std::sin(x) / x) / j[0];
    for (double& v : j) v *= scale;
  }
  std::vector<double> y(lmax + 1, 0.0);
  y[0] = -std::cos(x) / x;
  if (lmax >= 1) y[1] = -std::cos(x) / (x * x) - std::sin(x) / x;
  for (int l = 1; l + 1 <= lmax; ++l) y[l + 1] = (2.0 * l + 1.0) / x * y[l] - y[l - 1];

  const double cosg = xhat.dot(theta);
  double p_prev = 0.0, p_l = 1.0;  // P_{l-1}, P_l starting at l = 0
  cplx sum(0.0, 0.0);
  bool converged = false;
  int quiet = 0;  // a lone small term can be a Legendre zero, not tail decay
  for (int l = 0; l <= lmax; ++l) {
    const cplx hl(j[l], y[l]);
    const cplx term = (2.0 * l + 1.0) * (j[l] / hl) * p_l;
    sum += term;
    if (l >= 1 && std::abs(term) <= 1e-12 * std::abs(sum)) {
      if (++quiet == 2) {
        converged = true;
        break;
      }
    } else {
      quiet = 0;
    }
    const double p_next =
        (l == 0) ? cosg : ((2.0 * l + 1.0) * cosg * p_l - l * p_prev) / (l + 1.0);
    p_prev = p_l;
    p_l = p_next;
  }
  if (!converged) {
    fail(ErrorCode::SeriesNotConverged, "partial-wave series did not converge by order " +
                                            std::to_string(lmax));
  }
  return cplx(0.0, 1.0) * sum / kappa;
}

ApproximationError approximation_error(const Scene& scene, const DirectionSet& dirs, int level) {
  const ResponseMatrix point = response_matrix(assemble(scene), dirs);
  const ResponseMatrix ref = bem_response_matrix(scene, dirs, level);
  ApproximationError out;
  out.max_abs_err = (point.F - ref.F).cwiseAbs().maxCoeff();
  out.rel_err = out.max_abs_err / ref.F.cwiseAbs().maxCoeff();
  out.budget = error_budget(scene);
  return out;
}

}  // namespace scatterlax
