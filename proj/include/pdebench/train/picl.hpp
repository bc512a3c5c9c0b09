#pragma once

#include <torch/torch.h>

#include <vector>

#include "pdebench/datagen/coefficients.hpp"
#include "pdebench/datagen/dataset.hpp"
#include "pdebench/models/model.hpp"

namespace pdebench {

// One explicit-Euler update u + dt * rhs(u) with the same spatial stencils
// the trajectory solvers use: central Laplacian for diffusion, central first
// derivatives for linear advection, velocity-sign upwinding for the Burgers
// convection term. Periodic in both spatial axes; differentiable. `u` may
// carry any leading dimensions ahead of the trailing (n_x, n_y) pair.
// Rejects the vorticity equation (its update is not a pointwise stencil).
torch::Tensor euler_step(const torch::Tensor& u, PdeId pde,
                         const PdeCoefficients& coeffs, double dt,
                         const GridSpec& g);

// Physics-informed contrastive loss over one batch. For each trajectory the
// model maps frames [0, 8) to an 8-frame prediction G(u); the loss compares
// the solver step of sample i against sample j across all ordered pairs
// (diagonal included):
//   d_sys[i,j]  = frames[1,9) of i  -  frames[0,8) of j
//   d_upd[i,j]  = euler_step(G(u_i), pde_i)  -  G(u_j)
//   d_phys[i,j] = mean((d_sys - d_upd)^2)
//   L = mean_ij[ psi/2 * d_phys^2 + (1 - psi)/2 * max(tau - d_phys, 0)^2 ]
// psi is the coefficient-alignment weight of the pair. Requires
// out_frames == in_frames; `degenerate_pairs`, when given, accumulates the
// number of pairs whose psi fell back to 1 because both coefficient vectors
// were zero.
torch::Tensor picl_loss(OperatorModel& model, const Dataset& ds,
                        const std::vector<int>& idx, double tau,
                        int64_t* degenerate_pairs = nullptr);

}  // namespace pdebench
