#include "pdebench/datagen/coefficients.hpp"

namespace pdebench {

std::string to_string(PdeId p) {
  switch (p) {
    case PdeId::heat: return "heat";
    case PdeId::advection: return "advection";
    case PdeId::burgers: return "burgers";
    case PdeId::navier_stokes: return "navier_stokes";
  }
  throw ConfigError("unknown pde id");
}

std::string to_string(Distribution d) {
  return d == Distribution::in_dist ? "in" : "out";
}

std::string to_string(Split s) {
  switch (s) {
    case Split::pretrain: return "pretrain";
    case Split::finetune: return "finetune";
    case Split::validation: return "validation";
  }
  throw ConfigError("unknown split");
}

PdeId pde_from_string(const std::string& s) {
  if (s == "heat") return PdeId::heat;
  if (s == "advection") return PdeId::advection;
  if (s == "burgers") return PdeId::burgers;
  if (s == "navier_stokes") return PdeId::navier_stokes;
  throw ConfigError("unknown pde '" + s +
                    "' (expected heat|advection|burgers|navier_stokes)");
}

Distribution distribution_from_string(const std::string& s) {
  if (s == "in") return Distribution::in_dist;
  if (s == "out") return Distribution::out_dist;
  throw ConfigError("unknown distribution '" + s + "' (expected in|out)");
}

Split split_from_string(const std::string& s) {
  if (s == "pretrain") return Split::pretrain;
  if (s == "finetune") return Split::finetune;
  if (s == "validation") return Split::validation;
  throw ConfigError("unknown split '" + s +
                    "' (expected pretrain|finetune|validation)");
}

PdeCoefficients sample_coefficients(PdeId pde, Distribution dist,
                                    RngStream& rng) {
  const bool in = dist == Distribution::in_dist;
  PdeCoefficients c;
  switch (pde) {
    case PdeId::heat:
      c.nu = in ? rng.uniform(2e-3, 2e-2) : rng.uniform(2e-2, 3e-2);
      return c;
    case PdeId::advection:
      if (in) {
        c.c_x = rng.uniform(0.1, 2.5);
        c.c_y = rng.uniform(0.1, 2.5);
      } else {
        c.c_x = rng.uniform(2.5, 3.0);
        c.c_y = rng.uniform(2.5, 3.0);
      }
      return c;
    case PdeId::burgers:
      if (in) {
        c.nu = rng.uniform(7.5e-3, 1.5e-2);
        c.c_x = rng.uniform(0.5, 1.0);
        c.c_y = rng.uniform(0.5, 1.0);
      } else {
        c.nu = rng.uniform(5e-3, 7.5e-3);
        c.c_x = rng.uniform(1.0, 1.25);
        c.c_y = rng.uniform(1.0, 1.25);
      }
      return c;
    case PdeId::navier_stokes: {
      if (!in)
        throw ConfigError(
            "navier_stokes has no out-distribution coefficient pool");
      const int nu_idx = rng.uniform_int(36);  // mantissa 1..9 x exponent 6..9
      const int mantissa = 1 + nu_idx % 9;
      const int exponent = 6 + nu_idx / 9;
      c.nu = mantissa * std::pow(10.0, -exponent);
      c.amplitude = (1 + rng.uniform_int(10)) * 1e-3;
      return c;
    }
  }
  throw ConfigError("unknown pde id");
}

}  // namespace pdebench
