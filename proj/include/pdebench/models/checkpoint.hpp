#pragma once

#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "pdebench/models/model.hpp"

namespace pdebench {

// Provenance stored alongside the weights.
struct CheckpointMeta {
  ModelConfig config;
  std::string strategy = "none";
  std::string augmentation = "none";
  std::string task;          // downstream task the run targets
  std::string dataset_hash;  // hash of the pretraining dataset manifest
  std::string config_hash;   // orchestration config hash, may be empty
  uint64_t seed = 0;
};

nlohmann::json model_config_to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const nlohmann::json& j);

// One file per checkpoint: a /weights group holding one array per named
// parameter, and the metadata as a JSON document in a root attribute.
void save_checkpoint(const std::string& path, OperatorModel& model,
                     const CheckpointMeta& meta);

struct LoadedCheckpoint {
  CheckpointMeta meta;
  std::map<std::string, torch::Tensor> weights;
};

LoadedCheckpoint read_checkpoint(const std::string& path);

// Copies every stored array whose name and shape match a model parameter.
// Returns the number of model parameters left at their initialized values
// (e.g. the output layer when out_frames differs from the pretraining run).
int load_weights(OperatorModel& model,
                 const std::map<std::string, torch::Tensor>& weights);

// Rebuilds the model from the stored config and loads all weights; every
// parameter must match (IoError otherwise).
std::shared_ptr<OperatorModel> load_checkpoint_model(const std::string& path,
                                                     CheckpointMeta* meta_out = nullptr);

}  // namespace pdebench
