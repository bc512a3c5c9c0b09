#include "pdebench/config/runner.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include "pdebench/core/errors.hpp"
#include "pdebench/core/rng.hpp"
#include "pdebench/datagen/dataset.hpp"
#include "pdebench/models/checkpoint.hpp"
#include "pdebench/models/model.hpp"
#include "pdebench/train/finetune.hpp"
#include "pdebench/train/pretrain.hpp"
#include "pdebench/train/records.hpp"

namespace fs = std::filesystem;

namespace pdebench {

namespace {

std::string pool_label(const std::string& pde, const std::string& dist) {
  return pde == "navier_stokes" ? std::string("ns") : dist;
}

int split_count(const ExperimentConfig& cfg, const std::string& split) {
  if (split == "pretrain") return cfg.pretrain_per_pde;
  if (split == "finetune") return cfg.finetune_per_pde;
  if (split == "validation") return cfg.validation_per_pde;
  throw ConfigError("unknown split '" + split + "'");
}

void write_text_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp);
    out << text;
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp + " to " + path + ": " + ec.message());
}

std::string cell_identity(const ExperimentConfig& cfg, const CellPlan& c) {
  return c.model + ":" + c.strategy + ":" + c.augmentation + ":" + cfg.task;
}

// Checkpoints are keyed by everything the pretraining run depends on, so the
// (pde, distribution, n_samples) axes of the fine-tuning grid share them.
std::string checkpoint_path(const ExperimentConfig& cfg, const CellPlan& c) {
  return run_dir(cfg) + "/ckpt_" + c.model + "_" + c.strategy + "_" +
         c.augmentation + "_" + cfg.task + "_s" + std::to_string(c.seed) +
         ".h5";
}

std::string marker_path(const ExperimentConfig& cfg, const CellPlan& c) {
  return run_dir(cfg) + "/cells/" + cell_name(c) + ".done";
}

void pretrain_checkpoint(const ExperimentConfig& cfg, const CellPlan& cell,
                         const std::string& ckpt) {
  const auto strategy = strategy_from_string(cell.strategy);
  const auto task = task_from_string(cfg.task);
  const std::string pre_file = dataset_file(cfg, "pretrain", "in");
  const Dataset pre = load_dataset(pre_file);

  ModelConfig mc;
  mc.family = model_family_from_string(cell.model);
  mc.in_frames = cfg.in_frames;
  mc.out_frames = (strategy == Strategy::transfer &&
                   task == DownstreamTask::fixed_future)
                      ? 1
                      : cfg.in_frames;

  const std::string identity = cell_identity(cfg, cell);
  auto model =
      build_model(mc, hash_str(hash_str(cell.seed, "pretrain-init"), identity));

  PretrainSpec spec;
  spec.strategy = strategy;
  spec.augmentation = augmentation_from_string(cell.augmentation);
  spec.task = task;
  spec.epochs = cfg.pretrain_epochs;
  spec.batch_size = cfg.pretrain_batch;
  spec.lr = cfg.pretrain_lr;
  spec.weight_decay = cfg.weight_decay;
  spec.picl_tau = cfg.picl_tau;
  spec.mask_ratio = cfg.mask_ratio;
  spec.jigsaw_bank_size = cfg.jigsaw_bank;
  spec.fixed_future_frame = cfg.fixed_future_frame;
  spec.seed = hash_str(hash_str(cell.seed, "pretrain"), identity);

  std::fprintf(stderr, "  pretraining %s (%d samples)\n", identity.c_str(),
               static_cast<int>(pre.items.size()));
  pretrain(*model, pre, spec);

  CheckpointMeta meta;
  meta.config = mc;
  meta.strategy = cell.strategy;
  meta.augmentation = cell.augmentation;
  meta.task = cfg.task;
  meta.dataset_hash = fs::path(pre_file).filename().string() + ":" +
                      std::to_string(cfg.data_seed);
  meta.config_hash = config_hash(cfg);
  meta.seed = cell.seed;

  const std::string tmp = ckpt + ".tmp." + std::to_string(::getpid());
  save_checkpoint(tmp, *model, meta);
  std::error_code ec;
  fs::rename(tmp, ckpt, ec);
  if (ec) throw IoError("cannot move " + tmp + " to " + ckpt + ": " + ec.message());
}

std::string describe_status(int status) {
  std::ostringstream os;
  if (WIFEXITED(status))
    os << "exit code " << WEXITSTATUS(status);
  else if (WIFSIGNALED(status))
    os << "signal " << WTERMSIG(status);
  else
    os << "status " << status;
  return os.str();
}

pid_t spawn_cell(const std::string& exe, const std::string& config_path,
                 size_t index) {
  std::vector<std::string> args = {exe,       "cell",
                                   "--config", config_path,
                                   "--index",  std::to_string(index)};
  std::vector<char*> argv;
  argv.reserve(args.size() + 1);
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);

  const pid_t pid = ::fork();
  if (pid < 0) throw IoError("fork: " + std::string(std::strerror(errno)));
  if (pid == 0) {
    ::execv(exe.c_str(), argv.data());
    std::fprintf(stderr, "execv %s: %s\n", exe.c_str(), std::strerror(errno));
    ::_exit(127);
  }
  return pid;
}

}  // namespace

std::vector<CellPlan> enumerate_cells(const ExperimentConfig& cfg) {
  std::vector<CellPlan> cells;
  for (const auto& model : cfg.models)
    for (const auto& strategy : cfg.strategies)
      for (const auto& aug : cfg.augmentations)
        for (const auto& pde : cfg.pdes)
          for (const auto& dist : cfg.distributions) {
            if (pde == "navier_stokes" && dist == "out") continue;
            for (int n : cfg.n_samples)
              for (uint64_t seed : cfg.seeds)
                cells.push_back({model, strategy, aug, pde, dist, n, seed});
          }
  return cells;
}

std::string cell_name(const CellPlan& c) {
  std::ostringstream os;
  os << c.model << "_" << c.strategy << "_" << c.augmentation << "_" << c.pde
     << "_" << c.distribution << "_n" << c.n_samples << "_s" << c.seed;
  return os.str();
}

std::string dataset_file(const ExperimentConfig& cfg, const std::string& split,
                         const std::string& label) {
  std::ostringstream os;
  os << resolved_data_root(cfg) << "/" << split << "_" << label << "_r"
     << cfg.resolution << "_n" << split_count(cfg, split) << ".h5";
  return os.str();
}

std::string run_dir(const ExperimentConfig& cfg) {
  return resolved_data_root(cfg) + "/runs/" + config_hash(cfg);
}

std::string records_path(const ExperimentConfig& cfg) {
  return resolved_data_root(cfg) + "/" + cfg.records_file;
}

void ensure_datasets(const ExperimentConfig& cfg) {
  fs::create_directories(resolved_data_root(cfg));

  std::set<std::pair<std::string, std::string>> needed;
  bool any_pretext = false;
  for (const auto& s : cfg.strategies)
    if (s != "none") any_pretext = true;
  if (any_pretext) needed.insert({"pretrain", "in"});
  for (const auto& pde : cfg.pdes)
    for (const auto& dist : cfg.distributions) {
      if (pde == "navier_stokes" && dist == "out") continue;
      const std::string label = pool_label(pde, dist);
      needed.insert({"finetune", label});
      needed.insert({"validation", label});
    }

  for (const auto& [split, label] : needed) {
    const std::string file = dataset_file(cfg, split, label);
    if (dataset_complete(file)) continue;
    GenerateRequest req;
    req.split = split_from_string(split);
    if (label == "ns") {
      req.dist = Distribution::in_dist;
      req.pdes = {PdeId::navier_stokes};
    } else {
      req.dist = distribution_from_string(label);
    }
    req.resolution = cfg.resolution;
    req.count_per_pde = split_count(cfg, split);
    req.master_seed = cfg.data_seed;
    std::fprintf(stderr, "generating %s\n", file.c_str());
    write_dataset(req, file);
  }
}

std::string ensure_checkpoint(const ExperimentConfig& cfg,
                              const CellPlan& cell) {
  if (strategy_from_string(cell.strategy) == Strategy::none) return "";
  const std::string ckpt = checkpoint_path(cfg, cell);
  if (!fs::exists(ckpt)) {
    fs::create_directories(run_dir(cfg));
    pretrain_checkpoint(cfg, cell, ckpt);
  }
  return ckpt;
}

bool cell_done(const ExperimentConfig& cfg, const CellPlan& cell) {
  return fs::exists(marker_path(cfg, cell));
}

void run_cell(const ExperimentConfig& cfg, const CellPlan& cell) {
  const auto t_start = std::chrono::steady_clock::now();
  const auto strategy = strategy_from_string(cell.strategy);
  const auto task = task_from_string(cfg.task);
  const auto pde = pde_from_string(cell.pde);

  const std::string ckpt = ensure_checkpoint(cfg, cell);

  const std::string label = pool_label(cell.pde, cell.distribution);
  const Dataset pool = load_dataset(dataset_file(cfg, "finetune", label), pde);
  const Dataset val =
      load_dataset(dataset_file(cfg, "validation", label), pde);

  ModelConfig mc;
  mc.family = model_family_from_string(cell.model);
  mc.in_frames = cfg.in_frames;
  mc.out_frames = task == DownstreamTask::autoregressive ? cfg.in_frames : 1;

  // The same (model, seed) starts from the same weights whatever the
  // strategy, so columns differ only through the loaded checkpoint.
  auto model = build_model(
      mc, hash_str(hash_str(cell.seed, "finetune-init"), cell.model));
  if (strategy != Strategy::none) {
    const auto ck = read_checkpoint(ckpt);
    load_weights(*model, ck.weights);
  }

  FinetuneSpec spec;
  spec.task = task;
  spec.n_samples = cell.n_samples;
  spec.epochs = cfg.finetune_epochs;
  spec.batch_size = cfg.finetune_batch;
  spec.lr = cfg.finetune_lr;
  spec.weight_decay = cfg.weight_decay;
  spec.pushforward = cfg.pushforward;
  spec.fixed_future_frame = cfg.fixed_future_frame;
  spec.seed = hash_str(cell.seed, "finetune");

  std::fprintf(stderr, "  fine-tuning %s\n", cell_name(cell).c_str());
  const FinetuneOutcome out = finetune_and_evaluate(*model, pool, val, spec);

  MetricRecord rec;
  rec.model = cell.model;
  rec.strategy = cell.strategy;
  rec.augmentation = cell.augmentation;
  rec.pde = cell.pde;
  rec.distribution = cell.distribution;
  rec.task = cfg.task;
  rec.n_samples = cell.n_samples;
  rec.seed = cell.seed;
  rec.error = out.error;
  rec.diverged = out.diverged;
  rec.wall_clock_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  rec.config_hash = config_hash(cfg);

  append_records(records_path(cfg), {rec});
  fs::create_directories(run_dir(cfg) + "/cells");
  write_text_atomic(marker_path(cfg, cell), record_to_json_line(rec) + "\n");
}

int run_matrix(const ExperimentConfig& cfg, const std::string& config_path,
               int workers, bool dry_run, bool resume) {
  // Completion markers are always honored, so a plain re-run already resumes;
  // the flag exists to make that intent explicit on the command line.
  (void)resume;
  if (workers < 1) throw ConfigError("workers must be at least 1");

  const std::vector<CellPlan> cells = enumerate_cells(cfg);
  if (dry_run) {
    std::printf("planned %zu cells under %s\n", cells.size(),
                run_dir(cfg).c_str());
    for (const auto& c : cells) std::printf("  %s\n", cell_name(c).c_str());
    return 0;
  }

  fs::create_directories(run_dir(cfg) + "/cells");
  ensure_datasets(cfg);

  std::vector<size_t> pending;
  for (size_t i = 0; i < cells.size(); ++i) {
    if (fs::exists(marker_path(cfg, cells[i])))
      std::fprintf(stderr, "skip %s (already done)\n",
                   cell_name(cells[i]).c_str());
    else
      pending.push_back(i);
  }
  if (pending.empty()) {
    std::fprintf(stderr, "all %zu cells already done\n", cells.size());
    return 0;
  }

  const std::string exe = fs::read_symlink("/proc/self/exe").string();
  std::map<pid_t, size_t> running;
  size_t next = 0, done = 0;
  int failed = 0;

  while (next < pending.size() || !running.empty()) {
    while (next < pending.size() &&
           static_cast<int>(running.size()) < workers) {
      const size_t idx = pending[next++];
      std::fprintf(stderr, "[%zu/%zu] %s\n", done + running.size() + 1,
                   pending.size(), cell_name(cells[idx]).c_str());
      running[spawn_cell(exe, config_path, idx)] = idx;
    }
    int status = 0;
    const pid_t pid = ::waitpid(-1, &status, 0);
    if (pid < 0) {
      if (errno == EINTR) continue;
      throw IoError("waitpid: " + std::string(std::strerror(errno)));
    }
    const auto it = running.find(pid);
    if (it == running.end()) continue;
    const size_t idx = it->second;
    running.erase(it);
    ++done;
    if (!(WIFEXITED(status) && WEXITSTATUS(status) == 0)) {
      ++failed;
      std::fprintf(stderr, "cell %s failed (%s)\n",
                   cell_name(cells[idx]).c_str(),
                   describe_status(status).c_str());
    }
  }
  std::fprintf(stderr, "%zu cells run, %d failed\n", done, failed);
  return failed;
}

}  // namespace pdebench
