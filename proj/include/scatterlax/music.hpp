#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "scatterlax/directions.hpp"
#include "scatterlax/foldy.hpp"
#include "scatterlax/types.hpp"

namespace scatterlax {

// phi_z = (e^{-i kappa theta_n . z})_n over the direction set.
CVector steering_vector(const Vec3& z, const DirectionSet& dirs, double kappa);

// F + E with E i.i.d. complex Gaussian scaled so ||E||_F / ||F||_F is exactly
// 10^{-snr_db/20}; fully determined by the seed.
ResponseMatrix add_noise(const ResponseMatrix& response, double snr_db, std::uint64_t seed);

struct SubspaceSplit {
  RVector singular_values;  // descending
  int m_hat = 0;
  CMatrix noise_basis;    // left singular vectors m_hat+1 .. N, orthonormal
  bool ambiguous = false;  // no dominant spectral gap (all gaps within factor 2)
};

// SVD-based signal/noise split. m_hat = m_hint when given, otherwise the index
// of the largest ratio sigma_k / sigma_{k+1}. Throws RankDeficientAmbiguity
// when the gap spectrum is flat and no hint resolves it.
SubspaceSplit split_subspaces(const ResponseMatrix& response,
                              std::optional<int> m_hint = std::nullopt);

struct GridSpec {
  Vec3 lo;
  Vec3 hi;
  double step = 0.0;
};

struct Peak {
  Vec3 location;
  double value = 0.0;
};

struct ImagingGrid {
  GridSpec spec;
  std::array<int, 3> dims{0, 0, 0};
  std::vector<double> values;  // index (ix*ny + iy)*nz + iz
  std::vector<Peak> peaks;     // strict 26-neighbor maxima, best first

  int index(int ix, int iy, int iz) const { return (ix * dims[1] + iy) * dims[2] + iz; }
  Vec3 node(int ix, int iy, int iz) const {
    return spec.lo + spec.step * Vec3(double(ix), double(iy), double(iz));
  }
};

// Scans the box: value(z) = sqrt(N) / ||W^* phi_z|| (large near scatterer
// locations). Peaks are the top-m_hat strict local maxima.
ImagingGrid pseudospectrum(const SubspaceSplit& split, const DirectionSet& dirs, double kappa,
                           const GridSpec& spec);
ImagingGrid pseudospectrum_serial(const SubspaceSplit& split, const DirectionSet& dirs,
                                  double kappa, const GridSpec& spec);

struct MusicResult {
  std::vector<Vec3> locations;
  std::vector<cplx> capacitances;
  std::vector<double> radii;        // Re(C) / 4 pi
  double max_imag_fraction = 0.0;  // diagnostic: worst |Im C| / |C|
};

// Projects the (un-normalized) response 4 pi F onto the steering matrix
// H_{jl} = e^{i kappa theta_l . z_j}: with I_H = (H H^*)^{-1}, the matrix
// I_H H (4 pi F) H^* I_H reproduces the point-interaction matrix inverse, so
// its inverse's diagonal gives -1/C_m.
MusicResult recover_capacitances(const ResponseMatrix& response, const std::vector<Vec3>& locations,
                                 const DirectionSet& dirs, double kappa);

}  // namespace scatterlax
