#pragma once

#include <array>
#include <vector>

#include "pdebench/core/rng.hpp"
#include "pdebench/datagen/grid.hpp"

namespace pdebench {

// Five-mode sine initial condition:
//   u(0, x, y) = sum_j A_j sin(2 pi l_xj x / L + 2 pi l_yj y / L + phi_j)
// with A_j in [-0.5, 0.5), l in {1, 2, 3}, phi in [0, 2 pi). omega_j is
// drawn alongside the other parameters and retained for provenance, but does
// not enter the field.
struct SineIcParams {
  static constexpr int modes = 5;
  std::array<double, modes> amplitude{};
  std::array<int, modes> lx{};
  std::array<int, modes> ly{};
  std::array<double, modes> phase{};
  std::array<double, modes> omega{};
};

// Draw order per mode j: A_j, omega_j, l_xj, l_yj, phi_j.
SineIcParams sample_sine_ic_params(RngStream& rng);

// Evaluate on the grid, optionally at positions shifted by (-sx, -sy), i.e.
// the field transported by (sx, sy). out has n_x * n_y entries.
void eval_sine_ic(const SineIcParams& p, const GridSpec& g, double* out,
                  double sx = 0.0, double sy = 0.0);

// Periodic Gaussian random field with covariance 7^{3/2} (-Lap + 49 I)^{-2.5}
// on the grid's domain; the k = 0 mode is zeroed so the field has zero mean.
// Realized by filtering white noise in Fourier space (n_x * n_y normal draws
// in row-major order).
std::vector<double> sample_grf_ic(const GridSpec& g, RngStream& rng);

}  // namespace pdebench
