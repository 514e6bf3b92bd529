#include "scatterlax/music.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "scatterlax/parallel.hpp"

namespace scatterlax {

CVector steering_vector(const Vec3& z, const DirectionSet& dirs, double kappa) {
  const int n = dirs.size();
  CVector phi(n);
  for (int i = 0; i < n; ++i) {
    phi[i] = std::exp(cplx(0.0, -kappa * dirs.directions[i].dot(z)));
  }
  return phi;
}

ResponseMatrix add_noise(const ResponseMatrix& response, double snr_db, std::uint64_t seed) {
  if (!std::isfinite(snr_db)) fail(ErrorCode::NonPositive, "snr_db must be finite");
  const int n = static_cast<int>(response.F.rows());
  // Box-Muller on raw mt19937_64 draws keeps the stream platform-independent.
  std::mt19937_64 rng(seed);
  const auto uniform = [&rng]() {
    return (static_cast<double>(rng()) + 0.5) * (1.0 / 18446744073709551616.0);
  };
  CMatrix e(n, response.F.cols());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < response.F.cols(); ++j) {
      const double u1 = uniform(), u2 = uniform();
      const double r = std::sqrt(-2.0 * std::log(u1));
      e(i, j) = cplx(r * std::cos(2.0 * kPi * u2), r * std::sin(2.0 * kPi * u2));
    }
  }
  const double target = std::pow(10.0, -snr_db / 20.0) * response.F.norm();
  ResponseMatrix out = response;
  out.F += e * (target / e.norm());
  out.snr_db = snr_db;
  out.seed = seed;
  return out;
}

SubspaceSplit split_subspaces(const ResponseMatrix& response, std::optional<int> m_hint) {
  const int n = static_cast<int>(response.F.rows());
  if (n < 2 || response.F.cols() != n) {
    fail(ErrorCode::BadFormat, "response matrix must be square with at least two directions");
  }
  Eigen::JacobiSVD<CMatrix> svd(response.F, Eigen::ComputeFullU);
  SubspaceSplit split;
  split.singular_values = svd.singularValues();

  double best_gap = 0.0, min_gap = std::numeric_limits<double>::infinity();
  int best_k = 1;
  for (int k = 1; k <= n - 1; ++k) {
    const double lo = split.singular_values[k];
    const double gap = lo > 0.0 ? split.singular_values[k - 1] / lo
                                : std::numeric_limits<double>::infinity();
    if (gap > best_gap) {
      best_gap = gap;
      best_k = k;
    }
    min_gap = std::min(min_gap, gap);
  }
  split.ambiguous = best_gap < 2.0 * min_gap;

  if (m_hint.has_value()) {
    if (*m_hint < 1 || *m_hint > n - 1) {
      fail(ErrorCode::BadFormat, "signal dimension hint must lie in [1, N-1]");
    }
    split.m_hat = *m_hint;
  } else {
    if (split.ambiguous) {
      fail(ErrorCode::RankDeficientAmbiguity,
           "singular-value gaps are all within a factor 2; supply the scatterer count");
    }
    split.m_hat = best_k;
  }
  split.noise_basis = svd.matrixU().rightCols(n - split.m_hat);
  return split;
}

namespace {

template <bool Parallel>
ImagingGrid pseudospectrum_impl(const SubspaceSplit& split, const DirectionSet& dirs, double kappa,
                                const GridSpec& spec) {
  ImagingGrid grid;
  grid.spec = spec;
  if (!(spec.step > 0.0)) fail(ErrorCode::EmptyGrid, "grid step must be positive");
  for (int ax = 0; ax < 3; ++ax) {
    const double span = spec.hi[ax] - spec.lo[ax];
    if (span < 0.0) fail(ErrorCode::EmptyGrid, "grid box has negative extent");
    grid.dims[ax] = static_cast<int>(std::floor(span / spec.step + 1e-9)) + 1;
  }
  const int nx = grid.dims[0], ny = grid.dims[1], nz = grid.dims[2];
  const long long total = 1LL * nx * ny * nz;
  if (total <= 0) fail(ErrorCode::EmptyGrid, "grid contains no nodes");
  grid.values.assign(static_cast<size_t>(total), 0.0);

  const double sqrt_n = std::sqrt(static_cast<double>(dirs.size()));
  const CMatrix w_adj = split.noise_basis.adjoint();
#pragma omp parallel for schedule(static) num_threads(max_threads()) if (Parallel)
  for (int ix = 0; ix < nx; ++ix) {
    for (int iy = 0; iy < ny; ++iy) {
      for (int iz = 0; iz < nz; ++iz) {
        const CVector phi = steering_vector(grid.node(ix, iy, iz), dirs, kappa);
        const double denom = (w_adj * phi).norm();
        grid.values[grid.index(ix, iy, iz)] =
            denom > 0.0 ? sqrt_n / denom : std::numeric_limits<double>::infinity();
      }
    }
  }

  // strict local maxima over the 26-neighborhood (missing neighbors ignored)
  for (int ix = 0; ix < nx; ++ix) {
    for (int iy = 0; iy < ny; ++iy) {
      for (int iz = 0; iz < nz; ++iz) {
        const double v = grid.values[grid.index(ix, iy, iz)];
        bool is_peak = true;
        for (int dx = -1; dx <= 1 && is_peak; ++dx) {
          for (int dy = -1; dy <= 1 && is_peak; ++dy) {
            for (int dz = -1; dz <= 1 && is_peak; ++dz) {
              if (dx == 0 && dy == 0 && dz == 0) continue;
              const int jx = ix + dx, jy = iy + dy, jz = iz + dz;
              if (jx < 0 || jy < 0 || jz < 0 || jx >= nx || jy >= ny || jz >= nz) continue;
              if (grid.values[grid.index(jx, jy, jz)] >= v) is_peak = false;
            }
          }
        }
        if (is_peak) grid.peaks.push_back({grid.node(ix, iy, iz), v});
      }
    }
  }
  std::sort(grid.peaks.begin(), grid.peaks.end(),
            [](const Peak& a, const Peak& b) { return a.value > b.value; });
  if (static_cast<int>(grid.peaks.size()) > split.m_hat) grid.peaks.resize(split.m_hat);
  return grid;
}

}  // namespace

ImagingGrid pseudospectrum(const SubspaceSplit& split, const DirectionSet& dirs, double kappa,
                           const GridSpec& spec) {
  return pseudospectrum_impl<true>(split, dirs, kappa, spec);
}

ImagingGrid pseudospectrum_serial(const SubspaceSplit& split, const DirectionSet& dirs,
                                  double kappa, const GridSpec& spec) {
  return pseudospectrum_impl<false>(split, dirs, kappa, spec);
}

MusicResult recover_capacitances(const ResponseMatrix& response, const std::vector<Vec3>& locations,
                                 const DirectionSet& dirs, double kappa) {
  const int m = static_cast<int>(locations.size());
  const int n = dirs.size();
  if (m < 1 || m > n) fail(ErrorCode::BadFormat, "need 1 <= locations <= N directions");

  CMatrix h(m, n);
  for (int j = 0; j < m; ++j) {
    h.row(j) = steering_vector(locations[j], dirs, kappa).conjugate().transpose();
  }
  const CMatrix gram = h * h.adjoint();
  Eigen::JacobiSVD<CMatrix> svd(gram);
  const double cond = svd.singularValues()[0] / svd.singularValues()[m - 1];
  if (!(cond <= 1e8)) {
    fail(ErrorCode::IllConditionedH,
         "steering matrix is ill-conditioned (cond " + std::to_string(cond) +
             "); locations too close together or too few directions");
  }
  const CMatrix ih = gram.inverse();
  const CMatrix projected = ih * h * (kFourPi * response.F) * h.adjoint() * ih;
  const CMatrix b_hat = projected.inverse();

  MusicResult result;
  result.locations = locations;
  result.capacitances.resize(m);
  result.radii.resize(m);
  for (int j = 0; j < m; ++j) {
    const cplx c = -1.0 / b_hat(j, j);
    result.capacitances[j] = c;
    result.radii[j] = c.real() / kFourPi;
    const double mag = std::abs(c);
    if (mag > 0.0) {
      result.max_imag_fraction = std::max(result.max_imag_fraction, std::abs(c.imag()) / mag);
    }
  }
  return result;
}

}  // namespace scatterlax
