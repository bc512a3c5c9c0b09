#include "pdebench/datagen/initial_conditions.hpp"

#include <cmath>
#include <complex>

#include "pdebench/core/fft2.hpp"

namespace pdebench {

SineIcParams sample_sine_ic_params(RngStream& rng) {
  SineIcParams p;
  for (int j = 0; j < SineIcParams::modes; ++j) {
    p.amplitude[j] = rng.uniform(-0.5, 0.5);
    p.omega[j] = rng.uniform(-0.4, 0.4);
    p.lx[j] = 1 + rng.uniform_int(3);
    p.ly[j] = 1 + rng.uniform_int(3);
    p.phase[j] = rng.uniform(0.0, 2.0 * M_PI);
  }
  return p;
}

void eval_sine_ic(const SineIcParams& p, const GridSpec& g, double* out,
                  double sx, double sy) {
  const double kx0 = 2.0 * M_PI / g.lx();
  const double ky0 = 2.0 * M_PI / g.ly();
  for (int i = 0; i < g.n_x; ++i) {
    const double x = g.x(i) - sx;
    for (int j = 0; j < g.n_y; ++j) {
      const double y = g.y(j) - sy;
      double u = 0.0;
      for (int m = 0; m < SineIcParams::modes; ++m)
        u += p.amplitude[m] *
             std::sin(kx0 * p.lx[m] * x + ky0 * p.ly[m] * y + p.phase[m]);
      out[static_cast<size_t>(i) * g.n_y + j] = u;
    }
  }
}

std::vector<double> sample_grf_ic(const GridSpec& g, RngStream& rng) {
  const int nx = g.n_x, ny = g.n_y;
  const int hc = fft2::half_cols(ny);
  std::vector<double> noise(static_cast<size_t>(nx) * ny);
  for (double& w : noise) w = rng.normal();

  std::vector<std::complex<double>> spec(static_cast<size_t>(nx) * hc);
  fft2::forward(nx, ny, noise.data(), spec.data());

  // DFT of unit white noise has coefficient variance nx*ny; dividing by
  // sqrt(nx*ny) leaves unit-variance Hermitian coefficients, which are then
  // shaped by the square root of the covariance eigenvalues
  //   mu_k = tau^{3/2} (|k|^2 + tau^2)^{-2.5},  tau = 7,  k = 2 pi freq / L.
  const double tau = 7.0;
  const double alpha = 2.5;
  const double norm = 1.0 / std::sqrt(static_cast<double>(nx) * ny);
  for (int i = 0; i < nx; ++i) {
    const double kx = 2.0 * M_PI * fft2::freq(i, nx) / g.lx();
    for (int j = 0; j < hc; ++j) {
      const double ky = 2.0 * M_PI * j / g.ly();
      double amp = 0.0;
      if (i != 0 || j != 0) {
        const double mu =
            std::pow(tau, 1.5) * std::pow(kx * kx + ky * ky + tau * tau, -alpha);
        amp = std::sqrt(mu) * norm;
      }
      spec[static_cast<size_t>(i) * hc + j] *= amp;
    }
  }

  std::vector<double> out(static_cast<size_t>(nx) * ny);
  fft2::inverse(nx, ny, spec.data(), out.data());
  return out;
}

}  // namespace pdebench
