#include "pdebench/augment/augment.hpp"

#include <cmath>
#include <complex>
#include <iostream>
#include <vector>

#include "pdebench/core/fft2.hpp"

namespace pdebench {

std::string to_string(AugmentationKind k) {
  switch (k) {
    case AugmentationKind::none: return "none";
    case AugmentationKind::noise: return "noise";
    case AugmentationKind::shift: return "shift";
    case AugmentationKind::scale: return "scale";
  }
  throw ConfigError("unknown augmentation kind");
}

AugmentationKind augmentation_from_string(const std::string& s) {
  if (s == "none") return AugmentationKind::none;
  if (s == "noise") return AugmentationKind::noise;
  if (s == "shift") return AugmentationKind::shift;
  if (s == "scale") return AugmentationKind::scale;
  throw ConfigError("unknown augmentation '" + s +
                    "' (expected none|noise|shift|scale)");
}

void apply_noise(VolumeF& u, double variance, RngStream& rng) {
  for (float& v : u.v) v = static_cast<float>(v + variance * rng.normal());
}

void shift_plane(std::vector<double>& plane, const GridSpec& g, double delta_x,
                 double delta_y) {
  const int nx = g.n_x, ny = g.n_y, hc = fft2::half_cols(ny);
  if (plane.size() != static_cast<size_t>(nx) * ny)
    throw ShapeError("shift: plane does not match grid");
  std::vector<std::complex<double>> spec(static_cast<size_t>(nx) * hc);
  fft2::forward(nx, ny, plane.data(), spec.data());
  for (int i = 0; i < nx; ++i) {
    const double kx = 2.0 * M_PI * fft2::freq(i, nx) / g.lx();
    for (int j = 0; j < hc; ++j) {
      const double ky = 2.0 * M_PI * j / g.ly();
      const double phase = -(kx * delta_x + ky * delta_y);
      spec[static_cast<size_t>(i) * hc + j] *=
          std::complex<double>(std::cos(phase), std::sin(phase));
    }
  }
  fft2::inverse(nx, ny, spec.data(), plane.data());
}

void apply_shift(VolumeF& u, const GridSpec& g, double delta_x,
                 double delta_y) {
  if (u.d1 != g.n_x || u.d2 != g.n_y)
    throw ShapeError("shift: trajectory does not match grid");
  std::vector<double> frame(static_cast<size_t>(g.n_x) * g.n_y);
  for (int m = 0; m < u.d0; ++m) {
    float* p = u.plane(m);
    for (size_t i = 0; i < frame.size(); ++i) frame[i] = p[i];
    shift_plane(frame, g, delta_x, delta_y);
    for (size_t i = 0; i < frame.size(); ++i) p[i] = static_cast<float>(frame[i]);
  }
}

void apply_scale(VolumeF& u, double s) {
  for (float& v : u.v) v = static_cast<float>(v * s);
}

int apply_augmentation(Trajectory& t, const GridSpec& g,
                       const AugmentationSpec& spec, RngStream& rng) {
  switch (spec.kind) {
    case AugmentationKind::none:
      return 0;
    case AugmentationKind::noise:
      apply_noise(t.u, spec.noise_variance, rng);
      return 0;
    case AugmentationKind::shift: {
      const double dx = rng.uniform(spec.shift_min, spec.shift_max);
      const double dy = rng.uniform(spec.shift_min, spec.shift_max);
      apply_shift(t.u, g, dx, dy);
      return 0;
    }
    case AugmentationKind::scale: {
      const double s = rng.uniform(spec.scale_min, spec.scale_max);
      apply_scale(t.u, s);
      return std::abs(s) < 1e-3 ? 1 : 0;
    }
  }
  throw ConfigError("unknown augmentation kind");
}

Dataset expand_dataset(const Dataset& in, const AugmentationSpec& spec,
                       RngStream& rng) {
  Dataset out;
  out.grid = in.grid;
  out.split = in.split;
  out.dist = in.dist;
  out.items = in.items;
  out.items.reserve(in.items.size() * 2);
  int near_zero = 0;
  for (const Trajectory& orig : in.items) {
    Trajectory copy = orig;
    if (rng.uniform() < spec.apply_probability)
      near_zero += apply_augmentation(copy, in.grid, spec, rng);
    out.items.push_back(std::move(copy));
  }
  if (near_zero > 0)
    std::cerr << "expand_dataset: " << near_zero
              << " scale draw(s) below 1e-3 in magnitude\n";
  return out;
}

}  // namespace pdebench
