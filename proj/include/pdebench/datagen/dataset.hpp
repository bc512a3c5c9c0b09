#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pdebench/core/tensor3.hpp"
#include "pdebench/datagen/coefficients.hpp"
#include "pdebench/datagen/grid.hpp"
#include "pdebench/datagen/initial_conditions.hpp"

namespace pdebench {

struct Trajectory {
  PdeId pde = PdeId::heat;
  Distribution dist = Distribution::in_dist;
  VolumeF u;  // (n_t, n_x, n_y), float32 storage
  PdeCoefficients coeffs;
  uint64_t seed = 0;  // per-sample stream seed (regenerates IC + coeffs)
  int sample_index = 0;
  SineIcParams ic_params;  // provenance; meaningful when has_sine_ic
  bool has_sine_ic = false;
};

struct Dataset {
  GridSpec grid;
  Split split = Split::pretrain;
  Distribution dist = Distribution::in_dist;
  std::vector<Trajectory> items;
};

struct DatasetManifest {
  std::string file;
  Split split = Split::pretrain;
  Distribution dist = Distribution::in_dist;
  int resolution = 32;
  int format_version = 1;
  uint64_t master_seed = 0;
  std::vector<std::pair<std::string, int>> counts;  // pde id -> trajectories
};

struct GenerateRequest {
  Split split = Split::pretrain;
  Distribution dist = Distribution::in_dist;
  std::vector<PdeId> pdes;  // empty = heat+advection+burgers
  int resolution = 32;
  int count_per_pde = 0;
  uint64_t master_seed = 0;
  int workers = 1;
};

// Per-sample stream seed. The out-distribution Burgers pools reuse the
// in-distribution initial conditions, so their IC substream is derived with
// the in tag; everything else keys on its own (split, distribution) pair.
uint64_t sample_seed(uint64_t master, Split split, Distribution dist,
                     PdeId pde, int index);
uint64_t ic_stream_seed(uint64_t master, Split split, Distribution dist,
                        PdeId pde, int index);
uint64_t coeff_stream_seed(uint64_t master, Split split, Distribution dist,
                           PdeId pde, int index);

// Solve one sample deterministically from its derived streams.
Trajectory generate_sample(const GenerateRequest& req, PdeId pde, int index);

// Generate a full split in memory (sizes from the request).
Dataset generate_dataset(const GenerateRequest& req);

// Generate and write as an HDF5 container plus a JSON manifest beside it.
// The file carries a `complete` attribute that is 0 until finalization.
DatasetManifest write_dataset(const GenerateRequest& req,
                              const std::string& h5_path);

void save_dataset(const Dataset& ds, uint64_t master_seed,
                  const std::string& h5_path);
// Load a container; with `only` set, read just that equation's group so large
// pools do not have to fit in memory alongside the slice in use.
Dataset load_dataset(const std::string& h5_path,
                     std::optional<PdeId> only = std::nullopt);

// True when the file exists, opens as HDF5, and carries complete = 1; never
// throws (a half-written container just reads as incomplete).
bool dataset_complete(const std::string& h5_path);

std::string manifest_path_for(const std::string& h5_path);
std::string manifest_to_json(const DatasetManifest& m);

}  // namespace pdebench
