#pragma once

#include <string>
#include <vector>

#include "pdebench/config/config.hpp"

namespace pdebench {

// One fine-tuning cell of the experiment matrix; pretraining checkpoints are
// shared between cells that agree on (model, strategy, augmentation, seed).
struct CellPlan {
  std::string model;
  std::string strategy;
  std::string augmentation;
  std::string pde;
  std::string distribution;
  int n_samples = 0;
  uint64_t seed = 0;
};

// Cartesian grid models x strategies x augmentations x pdes x distributions
// x n_samples x seeds, in that nesting order. The (navier_stokes, out)
// combination is skipped (no such pool).
std::vector<CellPlan> enumerate_cells(const ExperimentConfig& cfg);

// Filesystem-safe cell identifier, unique within a config.
std::string cell_name(const CellPlan& c);

// Dataset container path: <root>/<split>_<label>_r<res>_n<count>.h5 where
// label is the distribution or "ns" for the vorticity pools.
std::string dataset_file(const ExperimentConfig& cfg, const std::string& split,
                         const std::string& label);

// Directory holding this config's checkpoints and completion markers.
std::string run_dir(const ExperimentConfig& cfg);

// Path of the shared record log.
std::string records_path(const ExperimentConfig& cfg);

// Generate any dataset container the configured cells will need that is
// missing or incomplete on disk.
void ensure_datasets(const ExperimentConfig& cfg);

// Path of the checkpoint shared by every cell with this cell's
// (model, strategy, augmentation, seed), pretraining and writing it first
// when missing. Strategy "none" needs no checkpoint and yields "".
std::string ensure_checkpoint(const ExperimentConfig& cfg,
                              const CellPlan& cell);

// True when the cell's completion marker exists.
bool cell_done(const ExperimentConfig& cfg, const CellPlan& cell);

// Run one cell in the current process: pretrain (or reuse) the checkpoint,
// fine-tune, evaluate, append the MetricRecord, write the completion marker.
void run_cell(const ExperimentConfig& cfg, const CellPlan& cell);

// Orchestrate the full grid with a bounded pool of worker processes
// (spawning this binary's `cell` subcommand per cell). Cells whose
// completion marker exists are skipped, so interrupted runs resume and a
// second identical run changes nothing. Returns the count of failed cells.
// dry_run prints the plan and executes nothing.
int run_matrix(const ExperimentConfig& cfg, const std::string& config_path,
               int workers, bool dry_run, bool resume);

}  // namespace pdebench
