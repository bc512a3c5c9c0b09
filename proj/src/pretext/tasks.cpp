#include "pdebench/pretext/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace pdebench {
namespace {

struct PatchGrid {
  int pt, px, py;  // patch extents
  int ct, cx, cy;  // patch counts
};

PatchGrid resolve(const VolumeF& u, const PatchSpec& patch) {
  PatchGrid pg;
  pg.pt = patch.t > 0 ? patch.t : u.d0;
  pg.px = patch.x > 0 ? patch.x : u.d1;
  pg.py = patch.y > 0 ? patch.y : u.d2;
  if (u.d0 % pg.pt || u.d1 % pg.px || u.d2 % pg.py)
    throw ShapeError("patch extents (" + std::to_string(pg.pt) + "," +
                     std::to_string(pg.px) + "," + std::to_string(pg.py) +
                     ") do not divide trajectory (" + std::to_string(u.d0) +
                     "," + std::to_string(u.d1) + "," + std::to_string(u.d2) +
                     ")");
  pg.ct = u.d0 / pg.pt;
  pg.cx = u.d1 / pg.px;
  pg.cy = u.d2 / pg.py;
  return pg;
}

void copy_patch(const VolumeF& src, VolumeF& dst, const PatchGrid& pg,
                int src_patch, int dst_patch) {
  const int scy = pg.cy, scx = pg.cx;
  const int st = src_patch / (scx * scy);
  const int sx = (src_patch / scy) % scx;
  const int sy = src_patch % scy;
  const int dt = dst_patch / (scx * scy);
  const int dx = (dst_patch / scy) % scx;
  const int dy = dst_patch % scy;
  for (int t = 0; t < pg.pt; ++t)
    for (int x = 0; x < pg.px; ++x)
      for (int y = 0; y < pg.py; ++y)
        dst.at(dt * pg.pt + t, dx * pg.px + x, dy * pg.py + y) =
            src.at(st * pg.pt + t, sx * pg.px + x, sy * pg.py + y);
}

}  // namespace

int patch_count(const VolumeF& u, const PatchSpec& patch) {
  const PatchGrid pg = resolve(u, patch);
  return pg.ct * pg.cx * pg.cy;
}

VolumeF permute_patches(const VolumeF& u, const PatchSpec& patch,
                        const Perm& perm) {
  const PatchGrid pg = resolve(u, patch);
  const int n = pg.ct * pg.cx * pg.cy;
  if (static_cast<int>(perm.size()) != n)
    throw ShapeError("permutation size " + std::to_string(perm.size()) +
                     " does not match patch count " + std::to_string(n));
  VolumeF out(u.d0, u.d1, u.d2);
  for (int i = 0; i < n; ++i) copy_patch(u, out, pg, perm[i], i);
  return out;
}

PretextBatch build_binary(const Trajectory& traj, int t_patch, RngStream& rng) {
  PretextBatch b;
  const PatchSpec patch = PatchSpec::temporal(t_patch);
  const int n = patch_count(traj.u, patch);
  const bool ordered = rng.uniform() < 0.5;
  if (ordered) {
    b.input = traj.u;
    b.label = 1;
    b.perm.resize(n);
    std::iota(b.perm.begin(), b.perm.end(), 0);
  } else {
    // Uniform over the non-identity permutations (lex indices 1 .. n!-1).
    const uint64_t idx =
        1 + static_cast<uint64_t>(rng.uniform_int(static_cast<int>(factorial(n)) - 1));
    b.perm = nth_permutation(n, idx);
    b.input = permute_patches(traj.u, patch, b.perm);
    b.label = 0;
  }
  return b;
}

PretextBatch build_sort(const Trajectory& traj, SortAxis axis, RngStream& rng) {
  PatchSpec patch;
  switch (axis) {
    case SortAxis::time:
      if (traj.u.d0 % 4)
        throw ShapeError("sort: temporal extent not divisible by 4");
      patch = PatchSpec{traj.u.d0 / 4, 0, 0};
      break;
    case SortAxis::space_x:
      if (traj.u.d1 % 4)
        throw ShapeError("sort: x extent not divisible by 4");
      patch = PatchSpec{0, traj.u.d1 / 4, 0};
      break;
    case SortAxis::space_y:
      if (traj.u.d2 % 4)
        throw ShapeError("sort: y extent not divisible by 4");
      patch = PatchSpec{0, 0, traj.u.d2 / 4};
      break;
  }
  PretextBatch b;
  const uint64_t idx = static_cast<uint64_t>(rng.uniform_int(24));
  b.perm = nth_permutation(4, idx);
  b.label = static_cast<int>(idx);
  b.input = permute_patches(traj.u, patch, b.perm);
  return b;
}

PretextBatch build_jigsaw(const Trajectory& traj, const std::vector<Perm>& bank,
                          const PatchSpec& patch, RngStream& rng) {
  if (bank.empty()) throw ConfigError("jigsaw: empty permutation bank");
  PretextBatch b;
  const int idx = rng.uniform_int(static_cast<int>(bank.size()));
  b.perm = bank[idx];
  b.label = idx;
  b.input = permute_patches(traj.u, patch, b.perm);
  return b;
}

PretextBatch build_coefficient(const Trajectory& traj) {
  PretextBatch b;
  b.input = traj.u;
  const auto& c = traj.coeffs;
  b.target_vec = {static_cast<float>(c.has_nu() ? c.nu : 0.0),
                  static_cast<float>(c.has_c() ? c.c_x : 0.0),
                  static_cast<float>(c.has_c() ? c.c_y : 0.0)};
  return b;
}

PretextBatch build_derivative(const Trajectory& traj, const GridSpec& g,
                              int window_start) {
  const int window = 8;
  const VolumeF& u = traj.u;
  if (window_start < 0 || window_start + window > u.d0)
    throw ShapeError("derivative: window [" + std::to_string(window_start) +
                     ", " + std::to_string(window_start + window) +
                     ") outside trajectory of " + std::to_string(u.d0) +
                     " frames");
  PretextBatch b;
  b.input = VolumeF(window, u.d1, u.d2);
  for (int t = 0; t < window; ++t)
    std::copy(u.plane(window_start + t), u.plane(window_start + t + 1),
              b.input.plane(t));

  const int f = window_start + window - 1;  // labeled frame
  const int nx = u.d1, ny = u.d2;
  const double inv_2dx = 1.0 / (2.0 * g.dx()), inv_2dy = 1.0 / (2.0 * g.dy());
  const double inv_dx2 = 1.0 / (g.dx() * g.dx()),
               inv_dy2 = 1.0 / (g.dy() * g.dy());
  const double inv_2dt = 1.0 / (2.0 * g.dt_save());

  b.target_field = VolumeF(5, nx, ny);
  for (int i = 0; i < nx; ++i) {
    const int ip = i + 1 == nx ? 0 : i + 1;
    const int im = i == 0 ? nx - 1 : i - 1;
    for (int j = 0; j < ny; ++j) {
      const int jp = j + 1 == ny ? 0 : j + 1;
      const int jm = j == 0 ? ny - 1 : j - 1;
      const double c = u.at(f, i, j);
      b.target_field.at(0, i, j) =
          static_cast<float>((u.at(f, ip, j) - u.at(f, im, j)) * inv_2dx);
      b.target_field.at(1, i, j) =
          static_cast<float>((u.at(f, i, jp) - u.at(f, i, jm)) * inv_2dy);
      b.target_field.at(2, i, j) = static_cast<float>(
          (u.at(f, ip, j) - 2.0 * c + u.at(f, im, j)) * inv_dx2);
      b.target_field.at(3, i, j) = static_cast<float>(
          (u.at(f, i, jp) - 2.0 * c + u.at(f, i, jm)) * inv_dy2);
      double ut;
      if (f == 0)
        ut = (-3.0 * u.at(0, i, j) + 4.0 * u.at(1, i, j) - u.at(2, i, j)) *
             inv_2dt;
      else if (f == u.d0 - 1)
        ut = (3.0 * u.at(f, i, j) - 4.0 * u.at(f - 1, i, j) +
              u.at(f - 2, i, j)) *
             inv_2dt;
      else
        ut = (u.at(f + 1, i, j) - u.at(f - 1, i, j)) * inv_2dt;
      b.target_field.at(4, i, j) = static_cast<float>(ut);
    }
  }
  return b;
}

PretextBatch build_masked(const Trajectory& traj, const PatchSpec& patch,
                          double ratio, const VolumeF& mask_token,
                          RngStream& rng) {
  const PatchGrid pg = resolve(traj.u, patch);
  if (mask_token.d0 != pg.pt || mask_token.d1 != pg.px ||
      mask_token.d2 != pg.py)
    throw ShapeError("masked: token shape does not match patch extents");
  const int n = pg.ct * pg.cx * pg.cy;
  const int m = static_cast<int>(std::lround(ratio * n));
  if (m < 0 || m > n)
    throw ConfigError("masked: ratio " + std::to_string(ratio) +
                      " selects an invalid patch count");

  // Partial Fisher-Yates: the first m entries are a uniform m-subset.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (int i = 0; i < m; ++i) {
    const int j = i + rng.uniform_int(n - i);
    std::swap(order[i], order[j]);
  }

  PretextBatch b;
  b.input = traj.u;
  b.target_field = traj.u;
  b.mask = Tensor3<uint8_t>(traj.u.d0, traj.u.d1, traj.u.d2, 0);
  for (int s = 0; s < m; ++s) {
    const int pidx = order[s];
    const int bt = pidx / (pg.cx * pg.cy);
    const int bx = (pidx / pg.cy) % pg.cx;
    const int by = pidx % pg.cy;
    for (int t = 0; t < pg.pt; ++t)
      for (int x = 0; x < pg.px; ++x)
        for (int y = 0; y < pg.py; ++y) {
          b.input.at(bt * pg.pt + t, bx * pg.px + x, by * pg.py + y) =
              mask_token.at(t, x, y);
          b.mask.at(bt * pg.pt + t, bx * pg.px + x, by * pg.py + y) = 1;
        }
  }
  return b;
}

std::array<double, 3> theta_vector(PdeId pde, const PdeCoefficients& c) {
  const double cnorm =
      c.has_c() ? std::sqrt(c.c_x * c.c_x + c.c_y * c.c_y) : 0.0;
  switch (pde) {
    case PdeId::burgers: return {cnorm, c.has_nu() ? c.nu : 0.0, 0.0};
    case PdeId::advection: return {0.0, 0.0, cnorm};
    default: return {0.0, c.has_nu() ? c.nu : 0.0, 0.0};
  }
}

double picl_psi(const std::array<double, 3>& a, const std::array<double, 3>& b,
                bool* degenerate) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (int i = 0; i < 3; ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  na = std::sqrt(na);
  nb = std::sqrt(nb);
  const double denom = std::max(na, nb);
  if (degenerate) *degenerate = denom == 0.0;
  if (denom == 0.0) return 1.0;
  return std::sqrt(std::abs(dot)) / denom;
}

}  // namespace pdebench
