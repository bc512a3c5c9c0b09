#include "pdebench/datagen/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <string>

#include "pdebench/core/fft2.hpp"

namespace pdebench {
namespace {

void check_ic(const std::vector<double>& ic, const GridSpec& g) {
  g.validate();
  if (ic.size() != static_cast<size_t>(g.n_x) * g.n_y)
    throw ShapeError("solver: ic size " + std::to_string(ic.size()) +
                     " does not match grid " + std::to_string(g.n_x) + "x" +
                     std::to_string(g.n_y));
}

void check_frame_finite(const Volume& u, int frame) {
  const double* p = u.plane(frame);
  const size_t n = static_cast<size_t>(u.d1) * u.d2;
  for (size_t i = 0; i < n; ++i)
    if (!std::isfinite(p[i]))
      throw NonFiniteError("solver: non-finite value in frame " +
                           std::to_string(frame));
}

// Number of internal sub-steps per save interval so that the step never
// exceeds dt_cap and every save instant is hit exactly.
int substeps(double dt_save, double dt_cap) {
  return std::max(1, static_cast<int>(std::ceil(dt_save / dt_cap - 1e-12)));
}

double laplacian(const double* f, int i, int j, int nx, int ny, double inv_dx2,
                 double inv_dy2) {
  const int ip = i + 1 == nx ? 0 : i + 1;
  const int im = i == 0 ? nx - 1 : i - 1;
  const int jp = j + 1 == ny ? 0 : j + 1;
  const int jm = j == 0 ? ny - 1 : j - 1;
  const double c = f[static_cast<size_t>(i) * ny + j];
  return (f[static_cast<size_t>(ip) * ny + j] - 2.0 * c +
          f[static_cast<size_t>(im) * ny + j]) *
             inv_dx2 +
         (f[static_cast<size_t>(i) * ny + jp] - 2.0 * c +
          f[static_cast<size_t>(i) * ny + jm]) *
             inv_dy2;
}

}  // namespace

Volume solve_heat(const std::vector<double>& ic, const GridSpec& g,
                  const PdeCoefficients& c, const SolveOptions& opt) {
  check_ic(ic, g);
  if (!(c.nu > 0)) throw ConfigError("heat: nu must be positive");
  const double inv_dx2 = 1.0 / (g.dx() * g.dx());
  const double inv_dy2 = 1.0 / (g.dy() * g.dy());
  const double limit = 1.0 / (4.0 * c.nu * (inv_dx2 + inv_dy2));
  double dt_cap = 0.9 * limit;
  if (opt.dt_internal) {
    if (*opt.dt_internal > limit)
      throw StabilityViolation("heat: dt " + std::to_string(*opt.dt_internal) +
                               " exceeds stability limit " +
                               std::to_string(limit));
    dt_cap = *opt.dt_internal;
  }

  Volume u(g.n_t, g.n_x, g.n_y);
  std::copy(ic.begin(), ic.end(), u.plane(0));
  std::vector<double> cur(ic), next(ic.size());
  const int n_sub = substeps(g.dt_save(), dt_cap);
  const double dt = g.dt_save() / n_sub;
  for (int m = 1; m < g.n_t; ++m) {
    for (int s = 0; s < n_sub; ++s) {
      for (int i = 0; i < g.n_x; ++i)
        for (int j = 0; j < g.n_y; ++j)
          next[static_cast<size_t>(i) * g.n_y + j] =
              cur[static_cast<size_t>(i) * g.n_y + j] +
              dt * c.nu * laplacian(cur.data(), i, j, g.n_x, g.n_y, inv_dx2,
                                    inv_dy2);
      cur.swap(next);
    }
    std::copy(cur.begin(), cur.end(), u.plane(m));
    check_frame_finite(u, m);
  }
  return u;
}

Volume solve_advection(const std::vector<double>& ic, const GridSpec& g,
                       const PdeCoefficients& c) {
  check_ic(ic, g);
  if (!c.has_c()) throw ConfigError("advection: velocity is required");
  const int nx = g.n_x, ny = g.n_y, hc = fft2::half_cols(ny);
  std::vector<std::complex<double>> spec(static_cast<size_t>(nx) * hc);
  fft2::forward(nx, ny, ic.data(), spec.data());

  Volume u(g.n_t, nx, ny);
  std::copy(ic.begin(), ic.end(), u.plane(0));
  std::vector<std::complex<double>> shifted(spec.size());
  for (int m = 1; m < g.n_t; ++m) {
    const double t = m * g.dt_save();
    for (int i = 0; i < nx; ++i) {
      const double kx = 2.0 * M_PI * fft2::freq(i, nx) / g.lx();
      for (int j = 0; j < hc; ++j) {
        const double ky = 2.0 * M_PI * j / g.ly();
        const double phase = -(kx * c.c_x + ky * c.c_y) * t;
        shifted[static_cast<size_t>(i) * hc + j] =
            spec[static_cast<size_t>(i) * hc + j] *
            std::complex<double>(std::cos(phase), std::sin(phase));
      }
    }
    fft2::inverse(nx, ny, shifted.data(), u.plane(m));
    check_frame_finite(u, m);
  }
  return u;
}

Volume solve_burgers(const std::vector<double>& ic, const GridSpec& g,
                     const PdeCoefficients& c, const SolveOptions& opt) {
  check_ic(ic, g);
  if (!(c.nu > 0) || !c.has_c())
    throw ConfigError("burgers: nu and velocity are required");
  const int nx = g.n_x, ny = g.n_y;
  const double dx = g.dx(), dy = g.dy();
  const double inv_dx2 = 1.0 / (dx * dx), inv_dy2 = 1.0 / (dy * dy);
  const double diff_limit = 1.0 / (4.0 * c.nu * (inv_dx2 + inv_dy2));

  Volume u(g.n_t, nx, ny);
  std::copy(ic.begin(), ic.end(), u.plane(0));
  std::vector<double> cur(ic), next(ic.size());

  for (int m = 1; m < g.n_t; ++m) {
    // CFL from the current amplitude; |u| does not grow under this scheme.
    double umax = 0.0;
    for (double v : cur) umax = std::max(umax, std::abs(v));
    const double conv_speed = umax * (c.c_x / dx + c.c_y / dy);
    const double cfl_limit =
        conv_speed > 0 ? 1.0 / conv_speed : std::numeric_limits<double>::max();
    const double limit = std::min(diff_limit, cfl_limit);
    double dt_cap = 0.9 * limit;
    if (opt.dt_internal) {
      if (*opt.dt_internal > limit)
        throw StabilityViolation("burgers: dt " +
                                 std::to_string(*opt.dt_internal) +
                                 " exceeds stability limit " +
                                 std::to_string(limit));
      dt_cap = *opt.dt_internal;
    }
    const int n_sub = substeps(g.dt_save(), dt_cap);
    const double dt = g.dt_save() / n_sub;

    for (int s = 0; s < n_sub; ++s) {
      for (int i = 0; i < nx; ++i) {
        const int ip = i + 1 == nx ? 0 : i + 1;
        const int im = i == 0 ? nx - 1 : i - 1;
        for (int j = 0; j < ny; ++j) {
          const int jp = j + 1 == ny ? 0 : j + 1;
          const int jm = j == 0 ? ny - 1 : j - 1;
          const size_t idx = static_cast<size_t>(i) * ny + j;
          const double uc = cur[idx];
          // Upwind side follows the sign of the local transport speed u*c.
          const double vx = uc * c.c_x;
          const double dudx =
              vx >= 0 ? (uc - cur[static_cast<size_t>(im) * ny + j]) / dx
                      : (cur[static_cast<size_t>(ip) * ny + j] - uc) / dx;
          const double vy = uc * c.c_y;
          const double dudy = vy >= 0
                                  ? (uc - cur[static_cast<size_t>(i) * ny + jm]) / dy
                                  : (cur[static_cast<size_t>(i) * ny + jp] - uc) / dy;
          next[idx] = uc + dt * (c.nu * laplacian(cur.data(), i, j, nx, ny,
                                                  inv_dx2, inv_dy2) -
                                 vx * dudx - vy * dudy);
        }
      }
      cur.swap(next);
    }
    std::copy(cur.begin(), cur.end(), u.plane(m));
    check_frame_finite(u, m);
  }
  return u;
}

Volume solve_navier_stokes(const std::vector<double>& ic, const GridSpec& g,
                           const PdeCoefficients& c, const SolveOptions& opt) {
  check_ic(ic, g);
  if (!(c.nu > 0) || !c.has_amplitude())
    throw ConfigError("navier_stokes: nu and forcing amplitude are required");
  const int nx = g.n_x, ny = g.n_y, hc = fft2::half_cols(ny);
  const size_t nspec = static_cast<size_t>(nx) * hc;
  const size_t nreal = static_cast<size_t>(nx) * ny;

  std::vector<double> kx(nx), ky(hc);
  for (int i = 0; i < nx; ++i) kx[i] = 2.0 * M_PI * fft2::freq(i, nx) / g.lx();
  for (int j = 0; j < hc; ++j) ky[j] = 2.0 * M_PI * j / g.ly();

  // 2/3-rule dealiasing mask on integer frequencies.
  std::vector<uint8_t> keep(nspec);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < hc; ++j)
      keep[static_cast<size_t>(i) * hc + j] =
          std::abs(fft2::freq(i, nx)) <= nx / 3 && j <= ny / 3;

  // Forcing A (sin(2 pi (x + y)) + cos(2 pi (x + y))) in spectral form.
  std::vector<double> f_real(nreal);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      const double s = 2.0 * M_PI * (g.x(i) + g.y(j));
      f_real[static_cast<size_t>(i) * ny + j] =
          c.amplitude * (std::sin(s) + std::cos(s));
    }
  std::vector<std::complex<double>> f_hat(nspec);
  fft2::forward(nx, ny, f_real.data(), f_hat.data());

  std::vector<std::complex<double>> w_hat(nspec), psi_hat(nspec), tmp_hat(nspec);
  fft2::forward(nx, ny, ic.data(), w_hat.data());

  std::vector<double> vel_u(nreal), vel_v(nreal), wx(nreal), wy(nreal),
      conv(nreal);

  Volume w(g.n_t, nx, ny);
  std::copy(ic.begin(), ic.end(), w.plane(0));

  const double dt_base = opt.dt_internal.value_or(1e-3);
  const int n_sub = substeps(g.dt_save(), dt_base);
  const double dt = g.dt_save() / n_sub;
  const std::complex<double> I(0.0, 1.0);

  for (int m = 1; m < g.n_t; ++m) {
    for (int s = 0; s < n_sub; ++s) {
      // Velocity from the streamfunction psi_hat = w_hat / |k|^2.
      for (int i = 0; i < nx; ++i)
        for (int j = 0; j < hc; ++j) {
          const size_t idx = static_cast<size_t>(i) * hc + j;
          const double k2 = kx[i] * kx[i] + ky[j] * ky[j];
          psi_hat[idx] = k2 > 0 ? w_hat[idx] / k2 : 0.0;
        }
      for (int i = 0; i < nx; ++i)
        for (int j = 0; j < hc; ++j) {
          const size_t idx = static_cast<size_t>(i) * hc + j;
          tmp_hat[idx] = I * ky[j] * psi_hat[idx];  // u = d psi / dy
        }
      fft2::inverse(nx, ny, tmp_hat.data(), vel_u.data());
      for (int i = 0; i < nx; ++i)
        for (int j = 0; j < hc; ++j) {
          const size_t idx = static_cast<size_t>(i) * hc + j;
          tmp_hat[idx] = -I * kx[i] * psi_hat[idx];  // v = -d psi / dx
        }
      fft2::inverse(nx, ny, tmp_hat.data(), vel_v.data());

      for (int i = 0; i < nx; ++i)
        for (int j = 0; j < hc; ++j) {
          const size_t idx = static_cast<size_t>(i) * hc + j;
          tmp_hat[idx] = I * kx[i] * w_hat[idx];
        }
      fft2::inverse(nx, ny, tmp_hat.data(), wx.data());
      for (int i = 0; i < nx; ++i)
        for (int j = 0; j < hc; ++j) {
          const size_t idx = static_cast<size_t>(i) * hc + j;
          tmp_hat[idx] = I * ky[j] * w_hat[idx];
        }
      fft2::inverse(nx, ny, tmp_hat.data(), wy.data());

      for (size_t p = 0; p < nreal; ++p)
        conv[p] = vel_u[p] * wx[p] + vel_v[p] * wy[p];
      fft2::forward(nx, ny, conv.data(), tmp_hat.data());

      // Crank-Nicolson viscous half-steps around explicit convection+forcing.
      for (int i = 0; i < nx; ++i)
        for (int j = 0; j < hc; ++j) {
          const size_t idx = static_cast<size_t>(i) * hc + j;
          if (!keep[idx]) tmp_hat[idx] = 0.0;
          const double k2 = kx[i] * kx[i] + ky[j] * ky[j];
          const double a = 0.5 * dt * c.nu * k2;
          w_hat[idx] = ((1.0 - a) * w_hat[idx] +
                        dt * (f_hat[idx] - tmp_hat[idx])) /
                       (1.0 + a);
        }
    }
    fft2::inverse(nx, ny, w_hat.data(), w.plane(m));
    check_frame_finite(w, m);
  }
  return w;
}

namespace {

// max over interior frames of ||R||_2 / ||du/dt||_2 where R subtracts the
// discrete right-hand side from the central time difference.
template <typename Rhs>
double residual_impl(const Volume& u, const GridSpec& g, Rhs rhs) {
  const int nx = u.d1, ny = u.d2;
  const double inv_2dt = 1.0 / (2.0 * g.dt_save());
  double worst = 0.0;
  for (int m = 1; m + 1 < u.d0; ++m) {
    const double* prev = u.plane(m - 1);
    const double* mid = u.plane(m);
    const double* next = u.plane(m + 1);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < ny; ++j) {
        const size_t idx = static_cast<size_t>(i) * ny + j;
        const double dudt = (next[idx] - prev[idx]) * inv_2dt;
        const double r = dudt - rhs(mid, i, j);
        num += r * r;
        den += dudt * dudt;
      }
    worst = std::max(worst, std::sqrt(num) / std::max(std::sqrt(den), 1e-300));
  }
  return worst;
}

}  // namespace

double heat_residual(const Volume& u, const GridSpec& g, double nu) {
  const double inv_dx2 = 1.0 / (g.dx() * g.dx());
  const double inv_dy2 = 1.0 / (g.dy() * g.dy());
  return residual_impl(u, g, [&](const double* f, int i, int j) {
    return nu * laplacian(f, i, j, g.n_x, g.n_y, inv_dx2, inv_dy2);
  });
}

double burgers_residual(const Volume& u, const GridSpec& g,
                        const PdeCoefficients& c) {
  const int nx = g.n_x, ny = g.n_y;
  const double inv_dx2 = 1.0 / (g.dx() * g.dx());
  const double inv_dy2 = 1.0 / (g.dy() * g.dy());
  const double inv_2dx = 1.0 / (2.0 * g.dx());
  const double inv_2dy = 1.0 / (2.0 * g.dy());
  return residual_impl(u, g, [&](const double* f, int i, int j) {
    const int ip = i + 1 == nx ? 0 : i + 1;
    const int im = i == 0 ? nx - 1 : i - 1;
    const int jp = j + 1 == ny ? 0 : j + 1;
    const int jm = j == 0 ? ny - 1 : j - 1;
    const double uc = f[static_cast<size_t>(i) * ny + j];
    const double dudx = (f[static_cast<size_t>(ip) * ny + j] -
                         f[static_cast<size_t>(im) * ny + j]) *
                        inv_2dx;
    const double dudy = (f[static_cast<size_t>(i) * ny + jp] -
                         f[static_cast<size_t>(i) * ny + jm]) *
                        inv_2dy;
    return c.nu * laplacian(f, i, j, nx, ny, inv_dx2, inv_dy2) -
           uc * (c.c_x * dudx + c.c_y * dudy);
  });
}

}  // namespace pdebench
