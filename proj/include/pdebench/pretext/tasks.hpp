#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "pdebench/core/rng.hpp"
#include "pdebench/core/tensor3.hpp"
#include "pdebench/datagen/dataset.hpp"
#include "pdebench/pretext/permutation.hpp"

namespace pdebench {

// Patch extents along (t, x, y); each must divide its trajectory extent.
struct PatchSpec {
  int t = 0, x = 0, y = 0;  // 0 means the full extent (no split on that axis)

  // Defaults used by the pretraining strategies for an (n_t, n_x, n_y)
  // trajectory: binary/timesort split time into patches of 8 frames; spacesort
  // splits one spatial axis in 4; jigsaw halves every axis (2x2x2 = 8 blocks);
  // masked quarters every axis (4x4x4 = 64 patches).
  static PatchSpec temporal(int frames) { return {frames, 0, 0}; }
  static PatchSpec jigsaw_default(int n_t, int n_x, int n_y) {
    return {n_t / 2, n_x / 2, n_y / 2};
  }
  static PatchSpec masked_default(int n_t, int n_x, int n_y) {
    return {n_t / 4, n_x / 4, n_y / 4};
  }
};

enum class SortAxis { time, space_x, space_y };

// One pretext sample. `input` feeds the model; exactly one label member is
// meaningful per task.
struct PretextBatch {
  VolumeF input;                    // (n_t or window, n_x, n_y)
  int label = -1;                   // class index; binary uses 0/1
  std::vector<float> target_vec;    // coefficient regression target
  VolumeF target_field;             // derivative / masked reconstruction
  Tensor3<uint8_t> mask;            // masked positions (1 = replaced)
  Perm perm;                        // applied permutation, for round trips
};

// Label 1 = temporally ordered (untouched), 0 = patch-shuffled with a
// uniformly drawn non-identity permutation of the temporal patches.
PretextBatch build_binary(const Trajectory& traj, int t_patch, RngStream& rng);

// Four patches along the chosen axis; the label is the lexicographic index
// of the applied permutation in S_4 (shuffled[i] = original[perm[i]]).
PretextBatch build_sort(const Trajectory& traj, SortAxis axis, RngStream& rng);

// Blocks in lexicographic (t, x, y) block order are permuted by a bank entry;
// the label is the bank index.
PretextBatch build_jigsaw(const Trajectory& traj, const std::vector<Perm>& bank,
                          const PatchSpec& patch, RngStream& rng);

// Label (nu, c_x, c_y); coefficients a PDE does not have enter as 0.
PretextBatch build_coefficient(const Trajectory& traj);

// Input is the 8-frame window starting at window_start; labels are the five
// derivative fields (u_x, u_y, u_xx, u_yy, u_t) of the window's last frame,
// second-order central with periodic wrap in space; temporal boundary frames
// use one-sided second-order stencils.
PretextBatch build_derivative(const Trajectory& traj, const GridSpec& g,
                              int window_start);

// Exactly round(ratio * n_patches) patches are replaced by the (patch-shaped)
// mask token; the target is the original trajectory, the mask records which
// entries were replaced.
PretextBatch build_masked(const Trajectory& traj, const PatchSpec& patch,
                          double ratio, const VolumeF& mask_token,
                          RngStream& rng);

// Applies `perm` to the patches of `u` (shuffled[i] = original[perm[i]]) for
// patch grid implied by `patch`. Exposed for round-trip tests and inversion.
VolumeF permute_patches(const VolumeF& u, const PatchSpec& patch,
                        const Perm& perm);

int patch_count(const VolumeF& u, const PatchSpec& patch);

// theta = [ ||c|| if burgers, nu (advection has none -> 0), ||c|| if advection ]
std::array<double, 3> theta_vector(PdeId pde, const PdeCoefficients& c);

// Coefficient-vector alignment psi in [0, 1]; both-zero pairs return 1.
double picl_psi(const std::array<double, 3>& a, const std::array<double, 3>& b,
                bool* degenerate = nullptr);

}  // namespace pdebench
