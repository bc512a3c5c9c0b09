#pragma once

#include <torch/torch.h>

#include <vector>

#include "pdebench/datagen/dataset.hpp"

namespace pdebench {

// Mean over the batch of ||pred - target||_2 / ||target||_2, norms taken
// over all field entries of a sample. Returns a 0-dim tensor so it can
// drive backprop; throws DegenerateTarget when any sample's target norm is
// zero and ShapeError on mismatched shapes.
torch::Tensor relative_l2(const torch::Tensor& pred,
                          const torch::Tensor& target);

// Per-sample variant, shape [batch].
torch::Tensor relative_l2_per_sample(const torch::Tensor& pred,
                                     const torch::Tensor& target);

// One-cycle learning rate (cosine annealing in both phases, warmup fraction
// pct_start, initial lr = max_lr / div_factor, final lr = initial /
// final_div_factor) as a pure function of the 0-based step index.
double one_cycle_lr(double max_lr, int64_t step, int64_t total_steps,
                    double pct_start = 0.3, double div_factor = 25.0,
                    double final_div_factor = 1e4);

// Cosine annealing from base_lr at epoch 0 to 0 at epoch total_epochs.
double cosine_annealing_lr(double base_lr, int64_t epoch,
                           int64_t total_epochs);

void set_lr(torch::optim::Optimizer& opt, double lr);

// Uniform n-subset of [0, pool_size) without replacement (partial
// Fisher-Yates); same seed gives the same subset, and subsets for different
// n are unrelated.
std::vector<int> seeded_subset(int pool_size, int n, uint64_t seed);

std::vector<int> shuffled_indices(int n, uint64_t seed);

torch::Tensor volume_to_tensor(const VolumeF& v);  // [d0, d1, d2] float32

// Stacked frame windows [batch, frames, n_x, n_y] for the given items.
torch::Tensor window_tensor(const Dataset& ds, const std::vector<int>& idx,
                            int start, int frames);

// Same, with one window start per item.
torch::Tensor window_tensor_at(const Dataset& ds, const std::vector<int>& idx,
                               const std::vector<int>& starts, int frames);

// Coordinate channels with one lead-time value per batch element.
torch::Tensor coords_for_leads(const GridSpec& g,
                               const std::vector<double>& leads,
                               torch::TensorOptions opts = {});

Dataset filter_pde(const Dataset& ds, PdeId pde);

}  // namespace pdebench
