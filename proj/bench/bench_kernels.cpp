// Timing harness for the OpenMP kernels vs their serial reference loops.
// Build with -DCMAKE_BUILD_TYPE=Release; run: ./bench_kernels [repeats]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>

#include "scatterlax/bem.hpp"
#include "scatterlax/capacitance.hpp"
#include "scatterlax/directions.hpp"
#include "scatterlax/foldy.hpp"
#include "scatterlax/music.hpp"
#include "scatterlax/parallel.hpp"
#include "scatterlax/scene.hpp"
#include "scatterlax/trimesh.hpp"

using namespace scatterlax;

namespace {

double time_best(int repeats, const std::function<void()>& fn) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (dt < best) best = dt;
  }
  return best;
}

void report(const std::string& name, double serial, double parallel) {
  std::printf("%-28s serial %8.3f ms   parallel %8.3f ms   speedup %5.2fx\n", name.c_str(),
              serial * 1e3, parallel * 1e3, serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
  const int repeats = argc > 1 ? std::atoi(argv[1]) : 3;
  std::printf("threads: %d\n", max_threads());

  {
    const TriMesh mesh = mesh_sphere(Vec3(0, 0, 0), 1.0, 3);  // 1280 panels
    volatile double sink = 0.0;
    const double ts = time_best(repeats, [&] { sink = slp0_matrix_serial(mesh)(0, 0); });
    const double tp = time_best(repeats, [&] { sink = slp0_matrix(mesh)(0, 0); });
    (void)sink;
    report("static SLP assembly (1280)", ts, tp);
  }

  {
    std::vector<TriMesh> meshes{mesh_sphere(Vec3(-1, 0, 0), 0.3, 3),
                                mesh_sphere(Vec3(1, 0, 0), 0.3, 3)};
    volatile double sink = 0.0;
    const double ts = time_best(repeats, [&] { sink = slp_matrix_serial(meshes, 1.0)(0, 0).real(); });
    const double tp = time_best(repeats, [&] { sink = slp_matrix(meshes, 1.0)(0, 0).real(); });
    (void)sink;
    report("Helmholtz SLP assembly (2560)", ts, tp);
  }

  {
    std::vector<Vec3> centers;
    RVector caps(64);
    for (int i = 0; i < 64; ++i) {
      centers.emplace_back(3.0 * (i % 4), 3.0 * ((i / 4) % 4), 3.0 * (i / 16));
      caps[i] = kFourPi * 0.1;
    }
    const FoldySystem sys = assemble_points(centers, caps, 1.0, 2.8);
    const DirectionSet dirs = gauss_legendre_directions(7);  // N = 98
    volatile double sink = 0.0;
    const double ts = time_best(repeats, [&] { sink = response_matrix_serial(sys, dirs).F(0, 0).real(); });
    const double tp = time_best(repeats, [&] { sink = response_matrix(sys, dirs).F(0, 0).real(); });
    (void)sink;
    report("response matrix (M=64,N=98)", ts, tp);
  }

  {
    std::vector<Vec3> centers{Vec3(0, 0, 0), Vec3(1.5, 1.5, 1.5), Vec3(-1.5, -1.5, 1.5)};
    RVector caps = RVector::Constant(3, kFourPi * 0.5);
    const FoldySystem sys = assemble_points(centers, caps, 1.0, 1.6);
    const DirectionSet dirs = gauss_legendre_directions(5);
    const ResponseMatrix f = response_matrix(sys, dirs);
    const SubspaceSplit split = split_subspaces(f, 3);
    const GridSpec spec{Vec3(-3, -3, -3), Vec3(3, 3, 3), 0.125};
    volatile double sink = 0.0;
    const double ts =
        time_best(repeats, [&] { sink = pseudospectrum_serial(split, dirs, 1.0, spec).values[0]; });
    const double tp =
        time_best(repeats, [&] { sink = pseudospectrum(split, dirs, 1.0, spec).values[0]; });
    (void)sink;
    report("pseudospectrum (49^3 grid)", ts, tp);
  }

  return 0;
}
