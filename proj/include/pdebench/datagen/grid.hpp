#pragma once

#include <string>

#include "pdebench/core/errors.hpp"

namespace pdebench {

enum class PdeId { heat, advection, burgers, navier_stokes };
enum class Distribution { in_dist, out_dist };
enum class Split { pretrain, finetune, validation };

std::string to_string(PdeId p);
std::string to_string(Distribution d);
std::string to_string(Split s);
PdeId pde_from_string(const std::string& s);
Distribution distribution_from_string(const std::string& s);
Split split_from_string(const std::string& s);

// Periodic space-time grid. Cells are [x_min + i*dx, ...), i.e. the left
// endpoint is included and x_max itself is not a grid point. Frames are saved
// at t_m = m * dt_save, m in [0, n_t).
struct GridSpec {
  int n_t = 32;
  int n_x = 32;
  int n_y = 32;
  double x_min = -1.0, x_max = 1.0;
  double y_min = -1.0, y_max = 1.0;
  double t_end = 2.0;

  double lx() const { return x_max - x_min; }
  double ly() const { return y_max - y_min; }
  double dx() const { return lx() / n_x; }
  double dy() const { return ly() / n_y; }
  double dt_save() const { return t_end / (n_t - 1); }
  double x(int i) const { return x_min + i * dx(); }
  double y(int j) const { return y_min + j * dy(); }

  void validate() const {
    if (n_t < 2 || n_x < 2 || n_y < 2)
      throw ConfigError("grid: all extents must be at least 2");
    if (x_max <= x_min || y_max <= y_min || t_end <= 0)
      throw ConfigError("grid: empty domain");
  }

  // Paper grids: heat/advection/burgers live on [-1,1]^2 with t_end = 2;
  // navier_stokes on [0,1]^2 with t_end = 7.75. 32 frames either way.
  static GridSpec standard(PdeId pde, int resolution) {
    GridSpec g;
    g.n_x = g.n_y = resolution;
    if (pde == PdeId::navier_stokes) {
      g.x_min = g.y_min = 0.0;
      g.x_max = g.y_max = 1.0;
      g.t_end = 7.75;
    }
    return g;
  }
};

}  // namespace pdebench
