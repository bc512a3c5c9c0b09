#include <cmath>

#include "doctest.h"
#include "pdebench/augment/augment.hpp"
#include "pdebench/datagen/initial_conditions.hpp"
#include "pdebench/datagen/solvers.hpp"

using namespace pdebench;

namespace {

VolumeF to_float(const Volume& u) {
  VolumeF out(u.d0, u.d1, u.d2);
  for (size_t i = 0; i < u.size(); ++i) out.v[i] = static_cast<float>(u.v[i]);
  return out;
}

Volume to_double(const VolumeF& u) {
  Volume out(u.d0, u.d1, u.d2);
  for (size_t i = 0; i < u.size(); ++i) out.v[i] = u.v[i];
  return out;
}

Trajectory sine_heat_trajectory(const GridSpec& g, uint64_t seed, double nu) {
  RngStream rng(seed);
  const SineIcParams p = sample_sine_ic_params(rng);
  std::vector<double> ic(g.n_x * g.n_y);
  eval_sine_ic(p, g, ic.data());
  Trajectory t;
  t.pde = PdeId::heat;
  t.coeffs.nu = nu;
  t.u = to_float(solve_heat(ic, g, t.coeffs));
  return t;
}

}  // namespace

TEST_CASE("full-period shift is the identity") {
  GridSpec g;
  Trajectory t = sine_heat_trajectory(g, 1, 1e-2);
  const VolumeF before = t.u;
  apply_shift(t.u, g, g.lx(), g.ly());
  for (size_t i = 0; i < before.size(); ++i)
    CHECK(std::abs(double(t.u.v[i]) - double(before.v[i])) < 1e-12);
}

TEST_CASE("shift commutes with advection") {
  GridSpec g;
  RngStream rng(21);
  const SineIcParams p = sample_sine_ic_params(rng);
  PdeCoefficients c;
  c.c_x = 1.3;
  c.c_y = -0.6;
  std::vector<double> ic(g.n_x * g.n_y);
  eval_sine_ic(p, g, ic.data());

  const double sx = 0.37, sy = -0.18;

  // advect, then shift every frame
  const Volume advected = solve_advection(ic, g, c);
  std::vector<double> plane(ic.size());

  // shift the IC, then advect
  std::vector<double> shifted = ic;
  shift_plane(shifted, g, sx, sy);
  const Volume b = solve_advection(shifted, g, c);

  for (int m = 0; m < g.n_t; ++m) {
    plane.assign(advected.plane(m), advected.plane(m + 1));
    shift_plane(plane, g, sx, sy);
    const double* want = b.plane(m);
    for (size_t i = 0; i < plane.size(); ++i)
      CHECK(std::abs(plane[i] - want[i]) < 1e-10);
  }
}

TEST_CASE("scaling preserves heat solutions but not burgers") {
  GridSpec g;
  const double nu = 1e-2;

  Trajectory heat = sine_heat_trajectory(g, 3, nu);
  const double base = heat_residual(to_double(heat.u), g, nu);
  apply_scale(heat.u, 0.37);
  const double scaled = heat_residual(to_double(heat.u), g, nu);
  CHECK(scaled < 2 * base + 1e-12);  // still a solution of the linear equation

  RngStream rng(4);
  const SineIcParams p = sample_sine_ic_params(rng);
  std::vector<double> ic(g.n_x * g.n_y);
  eval_sine_ic(p, g, ic.data());
  PdeCoefficients c;
  c.nu = nu;
  c.c_x = 1.0;
  c.c_y = 1.0;
  Trajectory burg;
  burg.pde = PdeId::burgers;
  burg.coeffs = c;
  burg.u = to_float(solve_burgers(ic, g, c));
  const double b_base = burgers_residual(to_double(burg.u), g, c);
  apply_scale(burg.u, 0.37);
  const double b_scaled = burgers_residual(to_double(burg.u), g, c);
  CHECK(b_scaled > 10 * b_base);
}

TEST_CASE("noise perturbs by variance times a standard normal") {
  GridSpec g;
  Trajectory t = sine_heat_trajectory(g, 5, 1e-2);
  const VolumeF before = t.u;
  RngStream rng(8);
  const double variance = 1e-7;
  apply_noise(t.u, variance, rng);

  double sum = 0.0, sum2 = 0.0;
  for (size_t i = 0; i < t.u.size(); ++i) {
    const double d = double(t.u.v[i]) - double(before.v[i]);
    sum += d;
    sum2 += d * d;
  }
  const double n = static_cast<double>(t.u.size());
  const double mean = sum / n;
  const double std = std::sqrt(sum2 / n - mean * mean);
  CHECK(std::abs(mean) < 5e-9);
  CHECK(std == doctest::Approx(variance).epsilon(0.05));

  RngStream rng2(8);
  VolumeF again = before;
  apply_noise(again, variance, rng2);
  CHECK(again.v == t.u.v);
}

TEST_CASE("near-zero scale draws are flagged") {
  GridSpec g;
  Trajectory t = sine_heat_trajectory(g, 6, 1e-2);
  AugmentationSpec spec;
  spec.kind = AugmentationKind::scale;
  spec.scale_min = -5e-4;
  spec.scale_max = 5e-4;
  spec.apply_probability = 1.0;
  RngStream rng(9);
  CHECK(apply_augmentation(t, g, spec, rng) == 1);

  spec.scale_min = 0.2;
  spec.scale_max = 0.5;
  Trajectory t2 = sine_heat_trajectory(g, 6, 1e-2);
  CHECK(apply_augmentation(t2, g, spec, rng) == 0);
}

TEST_CASE("expand_dataset doubles the split and keeps originals first") {
  GridSpec g;
  Dataset ds;
  ds.grid = g;
  ds.split = Split::pretrain;
  for (uint64_t s = 0; s < 40; ++s)
    ds.items.push_back(sine_heat_trajectory(g, 100 + s, 1e-2));

  AugmentationSpec spec;
  spec.kind = AugmentationKind::shift;
  RngStream rng(17);
  const Dataset out = expand_dataset(ds, spec, rng);
  REQUIRE(out.items.size() == 80);

  int changed = 0;
  for (size_t i = 0; i < 40; ++i) {
    CHECK(out.items[i].u.v == ds.items[i].u.v);  // originals verbatim, in order
    if (out.items[40 + i].u.v != ds.items[i].u.v) ++changed;
  }
  // the gate fires with probability 1/2 per copy
  CHECK(changed > 8);
  CHECK(changed < 32);

  RngStream rng2(17);
  const Dataset out2 = expand_dataset(ds, spec, rng2);
  for (size_t i = 0; i < out.items.size(); ++i)
    CHECK(out.items[i].u.v == out2.items[i].u.v);

  SUBCASE("augmentation none copies verbatim") {
    AugmentationSpec none;
    RngStream rng3(18);
    const Dataset plain = expand_dataset(ds, none, rng3);
    REQUIRE(plain.items.size() == 80);
    for (size_t i = 0; i < 40; ++i)
      CHECK(plain.items[40 + i].u.v == ds.items[i].u.v);
  }
}
