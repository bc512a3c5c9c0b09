#include "pdebench/config/config.hpp"

#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include <cstdlib>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "pdebench/augment/augment.hpp"
#include "pdebench/core/errors.hpp"
#include "pdebench/datagen/grid.hpp"
#include "pdebench/models/model.hpp"
#include "pdebench/pretext/strategy.hpp"

namespace pdebench {

namespace {

void reject_unknown_keys(const YAML::Node& section, const std::string& path,
                         const std::set<std::string>& known) {
  if (!section.IsDefined()) return;
  if (!section.IsMap()) {
    throw ConfigError(path + ": expected a key/value section");
  }
  for (const auto& kv : section) {
    const auto key = kv.first.as<std::string>();
    if (!known.count(key)) {
      throw ConfigError(path + "." + key + ": unknown key");
    }
  }
}

template <typename T>
void read(const YAML::Node& section, const std::string& path,
          const std::string& key, T& out) {
  if (!section.IsDefined()) return;
  const auto node = section[key];
  if (!node.IsDefined()) return;
  try {
    out = node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(path + "." + key + ": cannot parse value");
  }
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const YAML::BadFile&) {
    throw IoError("config: cannot open " + path);
  } catch (const YAML::ParserException& e) {
    throw IoError("config: " + path + ":" + std::to_string(e.mark.line + 1) +
                  ":" + std::to_string(e.mark.column + 1) + ": " + e.msg);
  }
  if (!root.IsMap()) throw ConfigError("config: top level must be a map");
  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    if (key != "dataset" && key != "model" && key != "pretrain" &&
        key != "finetune" && key != "report") {
      throw ConfigError(key + ": unknown section");
    }
  }

  ExperimentConfig cfg;
  const auto dataset = root["dataset"];
  reject_unknown_keys(dataset, "dataset",
                      {"root", "resolution", "seed", "pretrain_per_pde",
                       "finetune_per_pde", "validation_per_pde"});
  read(dataset, "dataset", "root", cfg.data_root);
  read(dataset, "dataset", "resolution", cfg.resolution);
  read(dataset, "dataset", "seed", cfg.data_seed);
  read(dataset, "dataset", "pretrain_per_pde", cfg.pretrain_per_pde);
  read(dataset, "dataset", "finetune_per_pde", cfg.finetune_per_pde);
  read(dataset, "dataset", "validation_per_pde", cfg.validation_per_pde);

  const auto model = root["model"];
  reject_unknown_keys(model, "model", {"families", "in_frames"});
  read(model, "model", "families", cfg.models);
  read(model, "model", "in_frames", cfg.in_frames);

  const auto pretrain = root["pretrain"];
  reject_unknown_keys(pretrain, "pretrain",
                      {"strategies", "augmentations", "epochs", "batch_size",
                       "lr", "weight_decay", "picl_tau", "mask_ratio",
                       "jigsaw_bank"});
  read(pretrain, "pretrain", "strategies", cfg.strategies);
  read(pretrain, "pretrain", "augmentations", cfg.augmentations);
  read(pretrain, "pretrain", "epochs", cfg.pretrain_epochs);
  read(pretrain, "pretrain", "batch_size", cfg.pretrain_batch);
  read(pretrain, "pretrain", "lr", cfg.pretrain_lr);
  read(pretrain, "pretrain", "weight_decay", cfg.weight_decay);
  read(pretrain, "pretrain", "picl_tau", cfg.picl_tau);
  read(pretrain, "pretrain", "mask_ratio", cfg.mask_ratio);
  read(pretrain, "pretrain", "jigsaw_bank", cfg.jigsaw_bank);

  const auto finetune = root["finetune"];
  reject_unknown_keys(finetune, "finetune",
                      {"task", "pdes", "distributions", "n_samples", "seeds",
                       "epochs", "batch_size", "lr", "pushforward",
                       "fixed_future_frame"});
  read(finetune, "finetune", "task", cfg.task);
  read(finetune, "finetune", "pdes", cfg.pdes);
  read(finetune, "finetune", "distributions", cfg.distributions);
  read(finetune, "finetune", "n_samples", cfg.n_samples);
  read(finetune, "finetune", "seeds", cfg.seeds);
  read(finetune, "finetune", "epochs", cfg.finetune_epochs);
  read(finetune, "finetune", "batch_size", cfg.finetune_batch);
  read(finetune, "finetune", "lr", cfg.finetune_lr);
  read(finetune, "finetune", "pushforward", cfg.pushforward);
  read(finetune, "finetune", "fixed_future_frame", cfg.fixed_future_frame);

  const auto report = root["report"];
  reject_unknown_keys(report, "report", {"dir", "records"});
  read(report, "report", "dir", cfg.report_dir);
  read(report, "report", "records", cfg.records_file);
  return cfg;
}

ConfigDiagnostics validate_config(const ExperimentConfig& cfg) {
  ConfigDiagnostics d;
  auto err = [&](const std::string& m) { d.errors.push_back(m); };

  if (cfg.resolution != 32 && cfg.resolution != 64) {
    err("dataset.resolution: must be 32 or 64, got " +
        std::to_string(cfg.resolution));
  }
  if (cfg.pretrain_per_pde < 1) err("dataset.pretrain_per_pde: must be >= 1");
  if (cfg.finetune_per_pde < 1) err("dataset.finetune_per_pde: must be >= 1");
  if (cfg.validation_per_pde < 1)
    err("dataset.validation_per_pde: must be >= 1");

  if (cfg.models.empty()) err("model.families: empty list");
  for (const auto& m : cfg.models) {
    try {
      model_family_from_string(m);
    } catch (const ConfigError& e) {
      err("model.families: " + std::string(e.what()));
    }
  }
  if (cfg.in_frames < 1 || 32 % std::max(cfg.in_frames, 1) != 0) {
    err("model.in_frames: must divide the 32-frame trajectory");
  }

  if (cfg.strategies.empty()) err("pretrain.strategies: empty list");
  for (const auto& s : cfg.strategies) {
    try {
      strategy_from_string(s);
    } catch (const ConfigError& e) {
      err("pretrain.strategies: " + std::string(e.what()));
    }
  }
  for (const auto& a : cfg.augmentations) {
    try {
      augmentation_from_string(a);
    } catch (const ConfigError& e) {
      err("pretrain.augmentations: " + std::string(e.what()));
    }
  }
  if (cfg.augmentations.empty()) err("pretrain.augmentations: empty list");
  if (cfg.pretrain_epochs < 0) err("pretrain.epochs: must be >= 0");
  if (cfg.pretrain_batch < 1) err("pretrain.batch_size: must be >= 1");
  if (cfg.pretrain_lr <= 0) err("pretrain.lr: must be > 0");
  if (cfg.weight_decay < 0) err("pretrain.weight_decay: must be >= 0");
  if (cfg.picl_tau <= 0) err("pretrain.picl_tau: must be > 0");
  if (cfg.mask_ratio <= 0 || cfg.mask_ratio > 1) {
    err("pretrain.mask_ratio: must lie in (0, 1]");
  }
  if (cfg.jigsaw_bank < 2) err("pretrain.jigsaw_bank: must be >= 2");

  try {
    task_from_string(cfg.task);
  } catch (const ConfigError& e) {
    err("finetune.task: " + std::string(e.what()));
  }
  if (cfg.pdes.empty()) err("finetune.pdes: empty list");
  for (const auto& p : cfg.pdes) {
    try {
      pde_from_string(p);
    } catch (const ConfigError& e) {
      err("finetune.pdes: " + std::string(e.what()));
    }
  }
  if (cfg.distributions.empty()) err("finetune.distributions: empty list");
  for (const auto& dist : cfg.distributions) {
    try {
      distribution_from_string(dist);
    } catch (const ConfigError& e) {
      err("finetune.distributions: " + std::string(e.what()));
      continue;
    }
    if (dist == "out") {
      for (const auto& p : cfg.pdes) {
        if (p == "navier_stokes") {
          err("finetune.distributions: navier_stokes has no out-distribution "
              "pool");
        }
      }
    }
  }
  if (cfg.n_samples.empty()) err("finetune.n_samples: empty list");
  for (int n : cfg.n_samples) {
    if (n < 1) {
      err("finetune.n_samples: must be >= 1, got " + std::to_string(n));
    } else if (n > cfg.finetune_per_pde) {
      err("finetune.n_samples: " + std::to_string(n) + " exceeds the " +
          std::to_string(cfg.finetune_per_pde) + "-sample pool");
    }
  }
  if (cfg.seeds.empty()) err("finetune.seeds: empty list");
  if (cfg.finetune_epochs < 1) err("finetune.epochs: must be >= 1");
  if (cfg.finetune_batch < 1) err("finetune.batch_size: must be >= 1");
  if (cfg.finetune_lr <= 0) err("finetune.lr: must be > 0");
  if (cfg.fixed_future_frame < cfg.in_frames || cfg.fixed_future_frame > 31) {
    err("finetune.fixed_future_frame: must lie in [" +
        std::to_string(cfg.in_frames) + ", 31]");
  }

  std::ostringstream tau;
  tau << cfg.picl_tau;
  d.warnings.push_back(
      "pretrain.picl_tau: margin " + tau.str() +
      " is a decided default; no established reference value exists");
  d.warnings.push_back(
      "finetune.epochs: " + std::to_string(cfg.finetune_epochs) +
      " epochs is a decided default; no established reference value exists");
  return d;
}

ConfigDiagnostics validate_config_file(const std::string& path) {
  try {
    return validate_config(load_config(path));
  } catch (const BenchError& e) {
    ConfigDiagnostics d;
    d.errors.push_back(e.what());
    return d;
  }
}

std::string config_canonical_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["dataset"] = {{"root", c.data_root},
                  {"resolution", c.resolution},
                  {"seed", c.data_seed},
                  {"pretrain_per_pde", c.pretrain_per_pde},
                  {"finetune_per_pde", c.finetune_per_pde},
                  {"validation_per_pde", c.validation_per_pde}};
  j["model"] = {{"families", c.models}, {"in_frames", c.in_frames}};
  j["pretrain"] = {{"strategies", c.strategies},
                   {"augmentations", c.augmentations},
                   {"epochs", c.pretrain_epochs},
                   {"batch_size", c.pretrain_batch},
                   {"lr", c.pretrain_lr},
                   {"weight_decay", c.weight_decay},
                   {"picl_tau", c.picl_tau},
                   {"mask_ratio", c.mask_ratio},
                   {"jigsaw_bank", c.jigsaw_bank}};
  j["finetune"] = {{"task", c.task},
                   {"pdes", c.pdes},
                   {"distributions", c.distributions},
                   {"n_samples", c.n_samples},
                   {"seeds", c.seeds},
                   {"epochs", c.finetune_epochs},
                   {"batch_size", c.finetune_batch},
                   {"lr", c.finetune_lr},
                   {"pushforward", c.pushforward},
                   {"fixed_future_frame", c.fixed_future_frame}};
  j["report"] = {{"dir", c.report_dir}, {"records", c.records_file}};
  return j.dump();
}

std::string config_hash(const ExperimentConfig& cfg) {
  const auto payload = config_canonical_json(cfg);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(payload.data(), payload.size(), digest, &len, EVP_sha256(),
                  nullptr)) {
    throw IoError("config_hash: digest computation failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (int i = 0; i < 8; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

std::string resolved_data_root(const ExperimentConfig& cfg) {
  const char* env = std::getenv("BENCH_DATA_ROOT");
  if (env && *env) return env;
  return cfg.data_root;
}

}  // namespace pdebench
