#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "scatterlax/scene.hpp"
#include "scatterlax/types.hpp"

namespace scatterlax::testing {

// Five spheres of radius 0.5 in the cross-diagonal arrangement used throughout
// the localization tests.
inline Scene five_sphere_scene(double kappa = 1.0) {
  std::vector<Scatterer> s;
  s.push_back(make_sphere(Vec3(0, 0, 0), 0.5));
  s.push_back(make_sphere(Vec3(1.5, 1.5, 1.5), 0.5));
  s.push_back(make_sphere(Vec3(1.5, 1.5, -1.5), 0.5));
  s.push_back(make_sphere(Vec3(-1.5, -1.5, 1.5), 0.5));
  s.push_back(make_sphere(Vec3(-1.5, -1.5, -1.5), 0.5));
  return Scene::make(std::move(s), kappa, 2.0, 10.0);
}

inline std::vector<Vec3> five_sphere_centers() {
  return {Vec3(0, 0, 0), Vec3(1.5, 1.5, 1.5), Vec3(1.5, 1.5, -1.5), Vec3(-1.5, -1.5, 1.5),
          Vec3(-1.5, -1.5, -1.5)};
}

// Random scene satisfying the energy-bound preconditions by construction:
// small kappa (so min cos(kappa |z_m - z_j|) >= 0) and radii well under the
// separation (so max C < (5 pi / 3) d).
inline Scene random_admissible_scene(std::uint64_t seed, int max_m = 10) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> m_dist(1, max_m);
  std::uniform_real_distribution<double> pos(-5.0, 5.0);
  // box diameter is 10*sqrt(3), so kappa <= 0.08 keeps kappa*|z_m - z_j| below
  // pi/2 and the cosine condition non-negative for every pair
  std::uniform_real_distribution<double> kappa_dist(0.0, 0.08);
  std::uniform_real_distribution<double> radius_frac(0.2, 1.0);

  const int m = m_dist(rng);
  std::vector<Vec3> centers;
  while (static_cast<int>(centers.size()) < m) {
    const Vec3 c(pos(rng), pos(rng), pos(rng));
    bool ok = true;
    for (const Vec3& z : centers) {
      if ((z - c).norm() < 1.5) {
        ok = false;
        break;
      }
    }
    if (ok) centers.push_back(c);
  }
  double min_center_dist = 1e30;
  for (size_t i = 0; i < centers.size(); ++i) {
    for (size_t j = i + 1; j < centers.size(); ++j) {
      min_center_dist = std::min(min_center_dist, (centers[i] - centers[j]).norm());
    }
  }
  if (m == 1) min_center_dist = 2.0;
  std::vector<Scatterer> scatterers;
  for (const Vec3& c : centers) {
    // keep spheres small relative to separation: C = 4 pi rho stays far below
    // (5 pi / 3) d even after the radius is subtracted from the gap
    const double rho = 0.05 * min_center_dist * radius_frac(rng);
    scatterers.push_back(make_sphere(c, rho));
  }
  return Scene::make(std::move(scatterers), kappa_dist(rng), 1.0, 100.0);
}

// Total charge on one of two identical grounded spheres (radius rho, center
// distance dist) held at potential 1, by the classical image-charge chain;
// exact up to the truncation of the rapidly converging series.
inline double two_grounded_spheres_charge(double rho, double dist, int iterations = 80) {
  double total = -kFourPi * rho;  // own charge
  double q = -kFourPi * rho;      // image source strength
  double s = dist;                // distance of the source from this center
  for (int it = 0; it < iterations; ++it) {
    const double q_img = -q * rho / s;     // image inside this sphere
    const double x_img = rho * rho / s;    // at this offset from the center
    total += q_img;
    q = q_img;
    s = dist - x_img;  // becomes the next source for the partner sphere
  }
  return total;
}

// Runs fn expecting it to throw Error; returns the code it threw.
template <typename Fn>
inline ErrorCode error_code_of(Fn&& fn) {
  try {
    std::forward<Fn>(fn)();
  } catch (const Error& e) {
    return e.code();
  }
  throw std::logic_error("expected an Error to be thrown");
}

// Least-squares slope of log(err) vs log(a).
inline double loglog_slope(const std::vector<double>& a, const std::vector<double>& err) {
  const int n = static_cast<int>(a.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double x = std::log(a[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

class TempDir {
 public:
  TempDir() {
    path_ = std::filesystem::temp_directory_path() /
            ("scatterlax_test_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace scatterlax::testing
