#include <doctest.h>

#include <Eigen/SVD>
#include <cmath>

#include "scatterlax/foldy.hpp"
#include "scatterlax/music.hpp"
#include "helpers.hpp"

using namespace scatterlax;
using namespace scatterlax::testing;

namespace {

FoldySystem pair_system(double cap, double dist, double kappa) {
  RVector caps(2);
  caps << cap, cap;
  return assemble_points({Vec3(0, 0, 0), Vec3(dist, 0, 0)}, caps, kappa, dist);
}

}  // namespace

TEST_CASE("free-space kernel") {
  const Vec3 x(0, 0, 0), y(2, 0, 0);
  CHECK(helmholtz_kernel(0.0, x, y) == cplx(1.0 / (8.0 * kPi), 0.0));
  const cplx k = helmholtz_kernel(kPi, x, Vec3(1, 0, 0));
  CHECK(k.real() == doctest::Approx(-1.0 / kFourPi).epsilon(1e-14));
  CHECK(std::abs(k.imag()) < 1e-16);
  CHECK(helmholtz_kernel(0.7, x, y) == helmholtz_kernel(0.7, y, x));
}

TEST_CASE("interaction matrix entries") {
  // single unit-capacitance scatterer: B = [-1/(4 pi)]
  std::vector<Scatterer> one{make_sphere(Vec3(0, 0, 0), 1.0)};
  const FoldySystem solo = assemble(Scene::make(std::move(one), 0.0, 1.0, 1.0));
  CHECK(solo.size() == 1);
  CHECK(solo.B(0, 0).real() == doctest::Approx(-1.0 / kFourPi).epsilon(1e-15));
  CHECK(solo.B(0, 0).imag() == 0.0);
  CHECK(std::isinf(solo.min_surface_distance));

  // static pair at distance 2: off-diagonal -1/(8 pi)
  const FoldySystem p0 = pair_system(kFourPi, 2.0, 0.0);
  CHECK(p0.B(0, 1).real() == doctest::Approx(-1.0 / (8.0 * kPi)).epsilon(1e-15));
  CHECK(p0.B(0, 1) == p0.B(1, 0));
  CHECK(p0.B(0, 0).real() == doctest::Approx(-1.0 / kFourPi).epsilon(1e-15));

  // kappa = pi at distance 1 flips the off-diagonal sign
  const FoldySystem ppi = pair_system(kFourPi, 1.0, kPi);
  CHECK(ppi.B(0, 1).real() == doctest::Approx(1.0 / kFourPi).epsilon(1e-13));
  CHECK(std::abs(ppi.B(0, 1).imag()) < 1e-15);
}

TEST_CASE("assembly rejects degenerate configurations") {
  RVector caps(2);
  caps << kFourPi, kFourPi;
  CHECK(error_code_of([&] {
          assemble_points({Vec3(1, 2, 3), Vec3(1, 2, 3)}, caps, 0.0, 1.0);
        }) == ErrorCode::CoincidentCenters);
  RVector bad(1);
  bad << 0.0;
  CHECK(error_code_of([&] { assemble_points({Vec3(0, 0, 0)}, bad, 0.0, 1.0); }) ==
        ErrorCode::NonPositive);
}

TEST_CASE("capacitance-4pi pair at distance one is singular") {
  // B = -(1/4pi) * ones(2,2) has rank one. A right-hand side outside the range
  // (unequal entries) cannot be solved and must be refused; a symmetric one is
  // consistent, and whatever particular solution comes back must be exact.
  const FoldySystem sys = pair_system(kFourPi, 1.0, 0.0);
  CVector outside(2);
  outside << cplx(1, 0), cplx(-1, 0);
  CHECK(error_code_of([&] { solve_system(sys, outside); }) == ErrorCode::SingularMatrix);

  try {
    const CVector q_sym = solve_system(sys, CVector::Ones(2));
    CHECK((sys.B * q_sym - CVector::Ones(2)).lpNorm<Eigen::Infinity>() < 1e-10);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularMatrix);  // refusing is also acceptable
  }

  // Q = -2 pi on both obstacles solves the fixed-point form
  //   Q_m + C_m sum_{j != m} Phi(z_m, z_j) Q_j = -C_m U_m  exactly:
  const cplx q(-2.0 * kPi, 0.0);
  const cplx phi = helmholtz_kernel(0.0, Vec3(0, 0, 0), Vec3(1, 0, 0));
  const cplx lhs = q + kFourPi * phi * q;
  CHECK(std::abs(lhs - cplx(-kFourPi, 0.0)) < 1e-13);
}

TEST_CASE("single scatterer charge is minus C times the incident trace") {
  std::vector<Scatterer> one{make_sphere(Vec3(1, 2, 3), 0.3)};
  const FoldySystem sys = assemble(Scene::make(std::move(one), 0.7, 1.0, 1.0));
  const Vec3 theta = Vec3(1, 1, 0).normalized();
  const ChargeVector cv = solve_charges(sys, theta);
  const double cap = kFourPi * 0.3;
  const cplx expected = -cap * std::exp(cplx(0.0, 0.7 * Vec3(1, 2, 3).dot(theta)));
  CHECK(std::abs(cv.Q(0) - expected) < 1e-12 * cap);
  CHECK(cv.incident_direction == theta);
}

TEST_CASE("incident trace has unit magnitude entries") {
  const FoldySystem sys = assemble(five_sphere_scene());
  const CVector u = incident_trace(sys, Vec3(0, 0, 1));
  for (int m = 0; m < u.size(); ++m) CHECK(std::abs(u(m)) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("identical pair hit broadside carries equal charges") {
  std::vector<Scatterer> s{make_sphere(Vec3(-1, 0, 0), 0.25), make_sphere(Vec3(1, 0, 0), 0.25)};
  const FoldySystem sys = assemble(Scene::make(std::move(s), 1.0, 2.0, 10.0));
  const ChargeVector cv = solve_charges(sys, Vec3(0, 0, 1));  // normal to the pair axis
  CHECK(std::abs(cv.Q(0) - cv.Q(1)) < 1e-13 * std::abs(cv.Q(0)));
}

TEST_CASE("static far field of a small sphere is minus its radius") {
  std::vector<Scatterer> one{make_sphere(Vec3(0, 0, 0), 0.2)};
  const FoldySystem sys = assemble(Scene::make(std::move(one), 0.0, 1.0, 1.0));
  const ChargeVector cv = solve_charges(sys, Vec3(0, 0, 1));
  for (const Vec3& xhat : {Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, -1)}) {
    const cplx f = far_field(sys, cv.Q, xhat);
    CHECK(f.real() == doctest::Approx(-0.2).epsilon(1e-14));
    CHECK(f.imag() == 0.0);
  }
}

TEST_CASE("static far field is direction independent for any cloud") {
  const FoldySystem sys = assemble(five_sphere_scene(0.0));
  const ChargeVector cv = solve_charges(sys, Vec3(0, 0, 1));
  const cplx ref = far_field(sys, cv.Q, Vec3(1, 0, 0));
  for (const Vec3& xhat : {Vec3(0, 1, 0), Vec3(0, 0, 1), Vec3(1, 1, 1).normalized()})
    CHECK(std::abs(far_field(sys, cv.Q, xhat) - ref) < 1e-14 * std::abs(ref));
}

TEST_CASE("far field respects mirror symmetry") {
  std::vector<Scatterer> s{make_sphere(Vec3(-1, 0, 0), 0.25), make_sphere(Vec3(1, 0, 0), 0.25)};
  const FoldySystem sys = assemble(Scene::make(std::move(s), 1.0, 2.0, 10.0));
  const ChargeVector cv = solve_charges(sys, Vec3(0, 0, 1));
  const Vec3 xhat = Vec3(0.3, 0.5, 0.8).normalized();
  const Vec3 mirrored(-xhat.x(), xhat.y(), xhat.z());
  CHECK(std::abs(far_field(sys, cv.Q, xhat) - far_field(sys, cv.Q, mirrored)) < 1e-13);
}

TEST_CASE("solver consistency under scaling of the data") {
  const FoldySystem sys = assemble(five_sphere_scene());
  const CVector rhs = incident_trace(sys, Vec3(0, 0, 1));
  const CVector q1 = solve_system(sys, rhs);
  const CVector q2 = solve_system(sys, cplx(2.0, 1.0) * rhs);
  CHECK((q2 - cplx(2.0, 1.0) * q1).norm() < 1e-12 * q1.norm());
  // residual of the returned solution is tiny
  CHECK((sys.B * q1 - rhs).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("response matrix of a centered monopole is constant") {
  std::vector<Scatterer> one{make_sphere(Vec3(0, 0, 0), 0.35)};
  const FoldySystem sys = assemble(Scene::make(std::move(one), 1.0, 2.0, 1.0));
  const DirectionSet dirs = gauss_legendre_directions(3);
  const ResponseMatrix rm = response_matrix(sys, dirs);
  CHECK(rm.d_gl == 3);
  CHECK(rm.kappa == 1.0);
  CHECK_FALSE(rm.snr_db.has_value());
  CHECK_FALSE(rm.seed.has_value());
  const cplx expected(-0.35, 0.0);
  for (int j = 0; j < rm.F.rows(); ++j)
    for (int l = 0; l < rm.F.cols(); ++l) CHECK(std::abs(rm.F(j, l) - expected) < 1e-13);
}

TEST_CASE("response matrix rank equals the number of scatterers") {
  const FoldySystem sys = assemble(five_sphere_scene());
  const ResponseMatrix rm = response_matrix(sys, gauss_legendre_directions(5));
  Eigen::JacobiSVD<CMatrix> svd(rm.F);
  const RVector sv = svd.singularValues();
  CHECK(sv(4) > 1e-3 * sv(0));
  CHECK(sv(5) < 1e-8 * sv(0));
}

TEST_CASE("translating the cloud only re-phases the response") {
  const DirectionSet dirs = gauss_legendre_directions(3);
  const double kappa = 1.0;
  const Vec3 v(0.3, -0.2, 0.5);

  const FoldySystem sys = assemble(five_sphere_scene(kappa));
  std::vector<Scatterer> moved;
  for (const Vec3& z : five_sphere_centers()) moved.push_back(make_sphere(z + v, 0.5));
  const FoldySystem sys2 = assemble(Scene::make(std::move(moved), kappa, 2.0, 10.0));

  const CMatrix f1 = response_matrix(sys, dirs).F;
  const CMatrix f2 = response_matrix(sys2, dirs).F;
  double worst = 0.0;
  for (int j = 0; j < f1.rows(); ++j) {
    for (int l = 0; l < f1.cols(); ++l) {
      const cplx phase =
          std::exp(cplx(0.0, kappa * (dirs.directions[l] - dirs.directions[j]).dot(v)));
      worst = std::max(worst, std::abs(f2(j, l) - phase * f1(j, l)));
    }
  }
  CHECK(worst < 1e-12 * f1.cwiseAbs().maxCoeff());
}

TEST_CASE("swapping source and receiver leaves the pattern unchanged") {
  for (std::uint64_t seed : {42u, 43u, 44u}) {
    const Scene scene = random_admissible_scene(seed);
    const FoldySystem sys = assemble(scene);
    const Vec3 xhat = Vec3(0.2, -0.7, 0.4).normalized();
    const Vec3 theta = Vec3(0.9, 0.1, -0.3).normalized();
    const cplx fwd = far_field(sys, solve_charges(sys, theta).Q, xhat);
    const cplx rev = far_field(sys, solve_charges(sys, -xhat).Q, -theta);
    CHECK(std::abs(fwd - rev) <= 1e-10 * std::max(1.0, std::abs(fwd)));
  }
}

TEST_CASE("response factors through the steering matrix") {
  const double kappa = 1.0;
  const FoldySystem sys = assemble(five_sphere_scene(kappa));
  const DirectionSet dirs = gauss_legendre_directions(4);
  const CMatrix f = response_matrix(sys, dirs).F;

  const int m = sys.size(), n = dirs.size();
  CMatrix h(m, n);
  for (int j = 0; j < m; ++j) h.row(j) = steering_vector(sys.centers[j], dirs, kappa).conjugate();
  const CMatrix reconstructed = h.adjoint() * sys.lu.solve(h) / kFourPi;
  CHECK((reconstructed - f).cwiseAbs().maxCoeff() < 1e-10 * f.cwiseAbs().maxCoeff());
}

TEST_CASE("single-interaction pattern is exact for one scatterer") {
  std::vector<Scatterer> one{make_sphere(Vec3(0.5, -1.0, 2.0), 0.15)};
  const FoldySystem sys = assemble(Scene::make(std::move(one), 0.9, 1.0, 1.0));
  const Vec3 xhat = Vec3(1, 2, 2).normalized();
  const Vec3 theta = Vec3(0, 1, 0);
  const cplx full = far_field(sys, solve_charges(sys, theta).Q, xhat);
  CHECK(std::abs(born_far_field(sys, xhat, theta) - full) < 1e-14);
}

TEST_CASE("single-interaction pattern for a static cloud sums capacitances") {
  const FoldySystem sys = assemble(five_sphere_scene(0.0));
  const double total = sys.capacitances.sum();
  const cplx b = born_far_field(sys, Vec3(1, 0, 0), Vec3(0, 0, 1));
  CHECK(b.real() == doctest::Approx(-total / kFourPi).epsilon(1e-13));
  CHECK(std::abs(b.imag()) < 1e-15);
}

TEST_CASE("single-interaction error obeys the pair bound") {
  // two spheres of radius 0.1 with surface gap 10
  std::vector<Scatterer> s{make_sphere(Vec3(0, 0, 0), 0.1), make_sphere(Vec3(10.2, 0, 0), 0.1)};
  const FoldySystem sys = assemble(Scene::make(std::move(s), 1.0, 2.0, 20.0));
  const double cap = kFourPi * 0.1;
  double worst = 0.0;
  for (const Vec3& theta : {Vec3(0, 0, 1), Vec3(1, 0, 0), Vec3(0.6, 0.8, 0.0)}) {
    const ChargeVector cv = solve_charges(sys, theta);
    for (const Vec3& xhat : {Vec3(0, 1, 0), Vec3(1, 0, 0), Vec3(0, 0, -1)}) {
      worst = std::max(worst,
                       std::abs(far_field(sys, cv.Q, xhat) - born_far_field(sys, xhat, theta)));
    }
  }
  const double bound = 2.0 * cap * cap / (kFourPi * kFourPi * 10.0) * 1.1;
  CHECK(worst <= bound);
  CHECK(worst > 0.1 * bound);  // the bound is sharp up to a modest constant
}

TEST_CASE("energy certificate for a single scatterer") {
  std::vector<Scatterer> one{make_sphere(Vec3(0, 0, 0), 0.4)};
  const FoldySystem sys = assemble(Scene::make(std::move(one), 0.8, 1.0, 1.0));
  const CVector rhs = incident_trace(sys, Vec3(0, 0, 1));
  const MazyaReport rep = verify_mazya_bound(sys, rhs);
  CHECK(rep.applicable());
  CHECK(rep.holds());
  CHECK(rep.t == 1.0);
  // |Q| = C exactly, so lhs = C and the bound is 4C
  CHECK(rep.lhs == doctest::Approx(0.25 * rep.rhs_bound).epsilon(1e-12));
}

TEST_CASE("energy certificate holds on admissible random scenes") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Scene scene = random_admissible_scene(seed);
    const FoldySystem sys = assemble(scene);
    const CVector rhs = incident_trace(sys, Vec3(0, 0, 1));
    const MazyaReport rep = verify_mazya_bound(sys, rhs);
    CHECK(rep.applicable());
    CHECK(rep.holds());
    CHECK(rep.lhs <= rep.rhs_bound);
  }
}

TEST_CASE("energy certificate declines oversized capacitances") {
  // gap condition fails: C deliberately above (5 pi / 3) d
  std::vector<Scatterer> s{make_sphere(Vec3(0, 0, 0), 0.1, 11.0),
                           make_sphere(Vec3(2.2, 0, 0), 0.1, 11.0)};
  const FoldySystem sys = assemble(Scene::make(std::move(s), 0.0, 1.0, 10.0));
  const MazyaReport rep = verify_mazya_bound(sys, incident_trace(sys, Vec3(0, 0, 1)));
  CHECK_FALSE(rep.applicable());
  CHECK(rep.max_capacitance == doctest::Approx(11.0));
  CHECK(rep.capacitance_threshold == doctest::Approx(5.0 * kPi / 3.0 * 2.0).epsilon(1e-12));
}

TEST_CASE("diagonal dominance margin") {
  std::vector<Scatterer> one{make_sphere(Vec3(0, 0, 0), 1.0)};
  CHECK(diag_dominance_margin(assemble(Scene::make(std::move(one), 0.0, 2.0, 1.0))) == 0.0);

  const FoldySystem pair = pair_system(kFourPi, 2.0, 0.0);
  CHECK(diag_dominance_margin(pair) == doctest::Approx(2.0 * kPi).epsilon(1e-14));

  const FoldySystem five = assemble(five_sphere_scene());
  CHECK(diag_dominance_margin(five) == doctest::Approx(9.673596609249161).epsilon(1e-12));
  CHECK(diag_dominance_margin(five) < kFourPi);
}

TEST_CASE("fixed-point sweep agrees with the direct solver when dominant") {
  // margin 2 pi / 4 is well under the 2 pi sweep threshold
  std::vector<Scatterer> s{make_sphere(Vec3(0, 0, 0), 0.5), make_sphere(Vec3(4, 0, 0), 0.5)};
  const FoldySystem sys = assemble(Scene::make(std::move(s), 1.0, 2.0, 10.0));
  CHECK(diag_dominance_margin(sys) < kPi);

  const CVector rhs = incident_trace(sys, Vec3(0.6, 0.0, 0.8));
  const CVector direct = solve_system(sys, rhs);
  const JacobiResult jr = jacobi_solve(sys, rhs);
  CHECK(jr.converged);
  CHECK(jr.iterations <= 200);
  CHECK((jr.Q - direct).cwiseAbs().maxCoeff() <= 1e-8 * direct.cwiseAbs().maxCoeff());
}

TEST_CASE("fixed-point sweep matches on admissible random scenes") {
  for (std::uint64_t seed : {100u, 101u, 102u}) {
    const FoldySystem sys = assemble(random_admissible_scene(seed));
    if (diag_dominance_margin(sys) >= 2.0 * kPi) continue;
    const CVector rhs = incident_trace(sys, Vec3(0, 0, 1));
    const JacobiResult jr = jacobi_solve(sys, rhs);
    CHECK(jr.converged);
    CHECK((jr.Q - solve_system(sys, rhs)).cwiseAbs().maxCoeff() <=
          1e-8 * solve_system(sys, rhs).cwiseAbs().maxCoeff());
  }
}
