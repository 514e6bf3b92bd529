#pragma once

#include <vector>

#include "scatterlax/types.hpp"

namespace scatterlax {

struct DirectionSet {
  std::vector<Vec3> directions;
  int d_gl = 0;  // N = 2 * d_gl^2

  int size() const { return static_cast<int>(directions.size()); }
};

// Roots of the Legendre polynomial P_n on (-1, 1), ascending.
std::vector<double> gauss_legendre_nodes(int n);

// N = 2*d_gl^2 unit vectors (cos(theta) sin(phi), sin(theta) sin(phi), cos(phi))
// with phi = arccos(GL_k), k = 1..d_gl, and theta = j*pi/d_gl, j = 0..2*d_gl-1.
DirectionSet gauss_legendre_directions(int d_gl);

}  // namespace scatterlax
