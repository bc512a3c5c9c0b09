#pragma once

#include "pdebench/core/rng.hpp"
#include "pdebench/datagen/dataset.hpp"

namespace pdebench {

enum class AugmentationKind { none, noise, shift, scale };

std::string to_string(AugmentationKind k);
AugmentationKind augmentation_from_string(const std::string& s);

struct AugmentationSpec {
  AugmentationKind kind = AugmentationKind::none;
  double noise_variance = 1e-7;  // perturbation magnitude is the variance
                                 // value itself times a standard normal
  double shift_min = -0.5, shift_max = 0.5;  // domain units, per axis
  double scale_min = -0.5, scale_max = 0.5;
  double apply_probability = 0.5;  // chance a copy is augmented
};

// u' = u + variance * eps, eps ~ N(0,1) drawn per entry in frame order.
void apply_noise(VolumeF& u, double variance, RngStream& rng);

// Transport every frame by (delta_x, delta_y) domain units via the Fourier
// shift theorem. Output is real by construction.
void apply_shift(VolumeF& u, const GridSpec& g, double delta_x, double delta_y);

// The same transport on one double-precision plane of n_x * n_y values; the
// trajectory overload above quantizes this result to float per frame.
void shift_plane(std::vector<double>& plane, const GridSpec& g, double delta_x,
                 double delta_y);

// u' = s * u.
void apply_scale(VolumeF& u, double s);

// Draw this augmentation's parameters from rng and apply (one draw per
// trajectory: (dx, dy) for shift, s for scale; noise draws per entry).
// Returns the number of values drawn that hit the near-zero-scale flag.
int apply_augmentation(Trajectory& t, const GridSpec& g,
                       const AugmentationSpec& spec, RngStream& rng);

// Doubles the dataset: the originals in order, then one copy of each, where
// each copy is augmented with probability spec.apply_probability (the copy is
// verbatim otherwise). Draw order per copy: the gate uniform, then the
// augmentation parameters if the gate passes. Near-zero scale factors
// (|s| < 1e-3) are counted and logged to stderr.
Dataset expand_dataset(const Dataset& in, const AugmentationSpec& spec,
                       RngStream& rng);

}  // namespace pdebench
