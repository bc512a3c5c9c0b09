#pragma once

#include <cmath>
#include <limits>

#include "pdebench/core/rng.hpp"
#include "pdebench/datagen/grid.hpp"

namespace pdebench {

// PDE coefficients; NaN marks "not applicable for this equation".
struct PdeCoefficients {
  double nu = std::numeric_limits<double>::quiet_NaN();
  double c_x = std::numeric_limits<double>::quiet_NaN();
  double c_y = std::numeric_limits<double>::quiet_NaN();
  double amplitude = std::numeric_limits<double>::quiet_NaN();  // NS forcing

  bool has_nu() const { return !std::isnan(nu); }
  bool has_c() const { return !std::isnan(c_x); }
  bool has_amplitude() const { return !std::isnan(amplitude); }
};

// Draw coefficients for one sample. Continuous ranges are half-open [a, b),
// which keeps the in/out pools disjoint where they share an endpoint.
// Draw order is part of the determinism contract:
//   heat:      nu
//   advection: c_x, c_y
//   burgers:   nu, c_x, c_y
//   ns:        one index over the 36 (mantissa, exponent) nu values, then
//              one index over the 10 forcing amplitudes
// (navier_stokes, out_dist) is rejected: the paper defines no such pool.
PdeCoefficients sample_coefficients(PdeId pde, Distribution dist, RngStream& rng);

}  // namespace pdebench
