#include "scatterlax/directions.hpp"

#include <cmath>

namespace scatterlax {

namespace {

// P_n(x) and P_n'(x) by the three-term recurrence.
void legendre_eval(int n, double x, double& p, double& dp) {
  double pm1 = 1.0, pm = x;
  if (n == 0) {
    p = 1.0;
    dp = 0.0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * pm - (k - 1.0) * pm1) / k;
    pm1 = pm;
    pm = pk;
  }
  p = pm;
  dp = n * (x * pm - pm1) / (x * x - 1.0);
}

}  // namespace

std::vector<double> gauss_legendre_nodes(int n) {
  if (n < 1) fail(ErrorCode::DegreeTooSmall, "Gauss-Legendre rule needs at least one node");
  std::vector<double> nodes(n);
  // Newton iteration from the Chebyshev-like initial guess; roots come out
  // descending so fill from the back to return ascending order.
  for (int i = 0; i < n; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p, dp;
      legendre_eval(n, x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[n - 1 - i] = x;
  }
  return nodes;
}

DirectionSet gauss_legendre_directions(int d_gl) {
  if (d_gl < 2) fail(ErrorCode::DegreeTooSmall, "direction grid requires d_gl >= 2");
  const std::vector<double> nodes = gauss_legendre_nodes(d_gl);
  DirectionSet set;
  set.d_gl = d_gl;
  set.directions.reserve(2 * d_gl * d_gl);
  for (int k = 0; k < d_gl; ++k) {
    const double phi = std::acos(nodes[k]);
    const double sp = std::sin(phi), cp = std::cos(phi);
    for (int j = 0; j < 2 * d_gl; ++j) {
      const double theta = j * kPi / d_gl;
      set.directions.emplace_back(std::cos(theta) * sp, std::sin(theta) * sp, cp);
    }
  }
  return set;
}

}  // namespace scatterlax
