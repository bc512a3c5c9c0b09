#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pdebench {

// Resolved experiment description. One config spans the full Cartesian cell
// grid (models x strategies x augmentations x pdes x n_samples x seeds);
// every artifact a run produces embeds this config's hash.
struct ExperimentConfig {
  // dataset
  std::string data_root = "data";
  int resolution = 32;
  uint64_t data_seed = 0;
  int pretrain_per_pde = 3072;
  int finetune_per_pde = 1024;
  int validation_per_pde = 256;

  // model
  std::vector<std::string> models = {"fno", "deeponet", "oformer", "unet"};
  int in_frames = 8;

  // pretraining
  std::vector<std::string> strategies = {"none"};
  std::vector<std::string> augmentations = {"none"};
  int pretrain_epochs = 0;  // 0 = per-strategy default
  int pretrain_batch = 32;
  double pretrain_lr = 1e-3;
  double weight_decay = 1e-6;
  double picl_tau = 1.0;
  double mask_ratio = 0.75;
  int jigsaw_bank = 1000;

  // fine-tuning
  std::string task = "autoregressive";
  std::vector<std::string> pdes = {"heat", "advection", "burgers"};
  std::vector<std::string> distributions = {"in"};
  std::vector<int> n_samples = {500};
  std::vector<uint64_t> seeds = {0};
  int finetune_epochs = 200;
  int finetune_batch = 32;
  double finetune_lr = 1e-3;
  bool pushforward = true;
  int fixed_future_frame = 31;

  // report
  std::string report_dir = "report";
  std::string records_file = "records.jsonl";
};

struct ConfigDiagnostics {
  std::vector<std::string> errors;    // schema violations, with field paths
  std::vector<std::string> warnings;  // decided defaults worth reviewing
};

// Parse a YAML experiment file. Unknown keys under known sections are
// schema errors; a missing file or YAML syntax error throws IoError with
// the parser's line/column.
ExperimentConfig load_config(const std::string& path);

ConfigDiagnostics validate_config(const ExperimentConfig& cfg);

// Convenience: parse + validate without throwing on schema problems.
ConfigDiagnostics validate_config_file(const std::string& path);

// First 16 hex characters of the SHA-256 of the canonical serialization.
// Any field change changes the hash.
std::string config_hash(const ExperimentConfig& cfg);

// Canonical JSON serialization (fixed key order) the hash is computed over.
std::string config_canonical_json(const ExperimentConfig& cfg);

// data_root after applying the BENCH_DATA_ROOT environment override.
std::string resolved_data_root(const ExperimentConfig& cfg);

}  // namespace pdebench
