#pragma once

#include <optional>
#include <vector>

#include "pdebench/core/tensor3.hpp"
#include "pdebench/datagen/coefficients.hpp"
#include "pdebench/datagen/grid.hpp"

namespace pdebench {

struct SolveOptions {
  // Explicit internal time step. When unset, solvers derive one from their
  // stability bound (0.9x the binding limit, subdivided to land exactly on
  // every save instant). When set, it is validated against the same bound and
  // StabilityViolation is thrown if it exceeds it.
  std::optional<double> dt_internal;
};

// All solvers take the initial condition as an n_x * n_y row-major field,
// return a (n_t, n_x, n_y) trajectory with frame 0 equal to the IC, and treat
// the domain as periodic. NonFiniteError carries the offending frame index.

// du/dt = nu Lap u. Forward Euler, second-order central differences.
// Stability bound: nu * dt * (1/dx^2 + 1/dy^2) <= 1/4.
Volume solve_heat(const std::vector<double>& ic, const GridSpec& g,
                  const PdeCoefficients& c, const SolveOptions& opt = {});

// du/dt + c . grad u = 0. Exact spectral phase shift: frame m is the IC
// transported by c * t_m, so dt options do not apply.
Volume solve_advection(const std::vector<double>& ic, const GridSpec& g,
                       const PdeCoefficients& c);

// du/dt + u (c . grad u) = nu Lap u. Forward Euler; central diffusion plus
// first-order upwind convection, switching sides on the sign of the local
// transport speed u * c. Stability: the heat bound combined with the CFL
// bound dt * max|u| (c_x/dx + c_y/dy) <= 1, re-evaluated every save interval.
Volume solve_burgers(const std::vector<double>& ic, const GridSpec& g,
                     const PdeCoefficients& c, const SolveOptions& opt = {});

// Vorticity form: dw/dt + u . grad w = nu Lap w + f, with the velocity
// recovered from the streamfunction and forcing
//   f = A (sin(2 pi (x + y)) + cos(2 pi (x + y))).
// Pseudo-spectral with 2/3-rule dealiasing; Crank-Nicolson viscous term,
// explicit convection. Internal step defaults to 1e-3.
Volume solve_navier_stokes(const std::vector<double>& ic, const GridSpec& g,
                           const PdeCoefficients& c,
                           const SolveOptions& opt = {});

// Diagnostic residuals of saved trajectories under their discrete operators,
// used to check whether a transformed trajectory still solves its equation.
// Time derivative is the central difference across save frames; the result is
// max over interior frames of ||residual||_2 / ||du/dt||_2.
double heat_residual(const Volume& u, const GridSpec& g, double nu);
double burgers_residual(const Volume& u, const GridSpec& g,
                        const PdeCoefficients& c);

}  // namespace pdebench
