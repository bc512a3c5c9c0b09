#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "CLI11.hpp"
#include "pdebench/config/config.hpp"
#include "pdebench/config/runner.hpp"
#include "pdebench/core/errors.hpp"
#include "pdebench/datagen/dataset.hpp"
#include "pdebench/report/report.hpp"
#include "pdebench/train/records.hpp"

namespace fs = std::filesystem;
using namespace pdebench;

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << text;
}

struct CellFilter {
  std::string model, strategy, augmentation, pde, distribution;
  int n_samples = -1;
  int64_t seed = -1;

  bool matches(const CellPlan& c) const {
    if (!model.empty() && c.model != model) return false;
    if (!strategy.empty() && c.strategy != strategy) return false;
    if (!augmentation.empty() && c.augmentation != augmentation) return false;
    if (!pde.empty() && c.pde != pde) return false;
    if (!distribution.empty() && c.distribution != distribution) return false;
    if (n_samples >= 0 && c.n_samples != n_samples) return false;
    if (seed >= 0 && c.seed != static_cast<uint64_t>(seed)) return false;
    return true;
  }

  void add_options(CLI::App* cmd) {
    cmd->add_option("--model", model, "restrict to one model family");
    cmd->add_option("--strategy", strategy, "restrict to one strategy");
    cmd->add_option("--augmentation", augmentation,
                    "restrict to one augmentation");
    cmd->add_option("--pde", pde, "restrict to one equation");
    cmd->add_option("--distribution", distribution, "restrict to in or out");
    cmd->add_option("--n", n_samples, "restrict to one training-set size");
    cmd->add_option("--seed", seed, "restrict to one seed");
  }
};

int cmd_generate(const std::string& config_path, const std::string& split,
                 const std::string& dist, std::vector<std::string> pde_names,
                 int resolution, int count, uint64_t seed,
                 const std::string& out) {
  if (!config_path.empty()) {
    ensure_datasets(load_config(config_path));
    return 0;
  }
  GenerateRequest req;
  req.split = split_from_string(split);
  req.dist = distribution_from_string(dist);
  for (const auto& name : pde_names) req.pdes.push_back(pde_from_string(name));
  req.resolution = resolution;
  if (count <= 0) {
    if (req.split == Split::pretrain) count = 3072;
    else if (req.split == Split::finetune) count = 1024;
    else count = 256;
  }
  req.count_per_pde = count;
  req.master_seed = seed;

  const bool vorticity_only =
      req.pdes.size() == 1 && req.pdes[0] == PdeId::navier_stokes;
  const std::string label = vorticity_only ? "ns" : dist;
  fs::create_directories(out);
  std::ostringstream file;
  file << out << "/" << split << "_" << label << "_r" << resolution << "_n"
       << count << ".h5";
  std::fprintf(stderr, "generating %s\n", file.str().c_str());
  const DatasetManifest m = write_dataset(req, file.str());
  for (const auto& [pde, n] : m.counts)
    std::printf("%s: %d trajectories\n", pde.c_str(), n);
  return 0;
}

int cmd_validate(const std::string& config_path) {
  const ConfigDiagnostics d = validate_config_file(config_path);
  for (const auto& e : d.errors) std::printf("error: %s\n", e.c_str());
  for (const auto& w : d.warnings) std::printf("warning: %s\n", w.c_str());
  if (!d.errors.empty()) return 1;
  std::printf("config ok (hash %s)\n",
              config_hash(load_config(config_path)).c_str());
  return 0;
}

int cmd_pretrain(const std::string& config_path, const CellFilter& filter) {
  const ExperimentConfig cfg = load_config(config_path);
  ensure_datasets(cfg);
  std::set<std::string> written;
  for (const auto& cell : enumerate_cells(cfg)) {
    if (cell.strategy == "none" || !filter.matches(cell)) continue;
    const std::string ckpt = ensure_checkpoint(cfg, cell);
    if (written.insert(ckpt).second)
      std::printf("checkpoint %s\n", ckpt.c_str());
  }
  if (written.empty()) {
    std::fprintf(stderr, "no pretraining cells match\n");
    return 1;
  }
  return 0;
}

int cmd_finetune(const std::string& config_path, const CellFilter& filter) {
  const ExperimentConfig cfg = load_config(config_path);
  ensure_datasets(cfg);
  int matched = 0;
  for (const auto& cell : enumerate_cells(cfg)) {
    if (!filter.matches(cell)) continue;
    ++matched;
    if (cell_done(cfg, cell)) {
      std::fprintf(stderr, "skip %s (already done)\n",
                   cell_name(cell).c_str());
      continue;
    }
    run_cell(cfg, cell);
    std::printf("done %s\n", cell_name(cell).c_str());
  }
  if (matched == 0) {
    std::fprintf(stderr, "no cells match\n");
    return 1;
  }
  return 0;
}

int cmd_cell(const std::string& config_path, size_t index) {
  const ExperimentConfig cfg = load_config(config_path);
  const std::vector<CellPlan> cells = enumerate_cells(cfg);
  if (index >= cells.size())
    throw ConfigError("cell index " + std::to_string(index) +
                      " out of range (plan has " +
                      std::to_string(cells.size()) + " cells)");
  run_cell(cfg, cells[index]);
  return 0;
}

// Key: (task, distribution, n_samples) -> records of that slice.
using GroupKey = std::tuple<std::string, std::string, int>;

std::string group_suffix(const GroupKey& k) {
  std::ostringstream os;
  os << std::get<0>(k) << "_" << std::get<1>(k) << "_n" << std::get<2>(k);
  return os.str();
}

int cmd_report(const std::string& records_file, const std::string& task,
               const std::string& out) {
  std::vector<MetricRecord> records = read_records(records_file);
  if (!task.empty()) {
    std::erase_if(records,
                  [&](const MetricRecord& r) { return r.task != task; });
  }
  if (records.empty()) {
    std::fprintf(stderr, "no records match\n");
    return 1;
  }
  fs::create_directories(out);

  std::map<GroupKey, std::vector<MetricRecord>> groups;
  for (const auto& r : records)
    groups[{r.task, r.distribution, r.n_samples}].push_back(r);

  std::map<GroupKey, ResultTable> tables;
  for (const auto& [key, recs] : groups) {
    ResultTable t = aggregate(recs);
    const std::string suffix = group_suffix(key);
    write_text(out + "/results_" + suffix + ".md", render_markdown(t));
    write_text(out + "/results_" + suffix + ".csv", render_csv(t));
    try {
      write_text(out + "/best_" + suffix + ".md", render_best_summary(t));
    } catch (const BenchError& e) {
      std::fprintf(stderr, "best summary %s skipped: %s\n", suffix.c_str(),
                   e.what());
    }
    tables.emplace(key, std::move(t));
  }

  // Improvement vs training-set size, one summary per (task, distribution)
  // that spans several sizes, with a plot per (model, pde) slice.
  std::map<std::pair<std::string, std::string>, std::vector<ResultTable>>
      by_task_dist;
  for (const auto& [key, t] : tables)
    by_task_dist[{std::get<0>(key), std::get<1>(key)}].push_back(t);
  for (const auto& [td, by_n] : by_task_dist) {
    if (by_n.size() < 2) continue;
    const std::string suffix = td.first + "_" + td.second;
    try {
      write_text(out + "/scaling_" + suffix + ".md",
                 render_scaling_summary(scaling_summary(by_n)));
    } catch (const BenchError& e) {
      std::fprintf(stderr, "scaling summary %s skipped: %s\n", suffix.c_str(),
                   e.what());
    }
    for (const auto& model : by_n.front().models)
      for (const auto& pde : by_n.front().pdes) {
        const std::string stem =
            out + "/scaling_" + suffix + "_" + model + "_" + pde;
        try {
          write_text(stem + ".svg", render_scaling_svg(by_n, model, pde));
          write_text(stem + ".csv", render_scaling_csv(by_n, model, pde));
        } catch (const BenchError& e) {
          std::fprintf(stderr, "plot %s skipped: %s\n", stem.c_str(),
                       e.what());
        }
      }
  }

  // In/out generalization at a fixed size, with the vorticity dataset as its
  // own column when present (it only exists in-distribution).
  std::map<std::pair<std::string, int>, std::map<std::string, ResultTable>>
      by_task_n;
  for (const auto& [key, t] : tables)
    by_task_n[{std::get<0>(key), std::get<2>(key)}].emplace(std::get<1>(key),
                                                            t);
  for (const auto& [tn, by_dist] : by_task_n) {
    if (!by_dist.count("in") || !by_dist.count("out")) continue;
    std::vector<std::pair<std::string, ResultTable>> by_label;
    by_label.emplace_back("in", by_dist.at("in"));
    by_label.emplace_back("out", by_dist.at("out"));
    std::ostringstream suffix;
    suffix << tn.first << "_n" << tn.second;
    try {
      write_text(out + "/generalization_" + suffix.str() + ".md",
                 render_generalization_summary(generalization_summary(by_label)));
    } catch (const BenchError& e) {
      std::fprintf(stderr, "generalization summary %s skipped: %s\n",
                   suffix.str().c_str(), e.what());
    }
  }

  std::printf("wrote report under %s\n", out.c_str());
  return 0;
}

int cmd_run(const std::string& config_path, int workers, bool dry_run,
            bool resume) {
  const ExperimentConfig cfg = load_config(config_path);
  const ConfigDiagnostics d = validate_config(cfg);
  for (const auto& e : d.errors) std::fprintf(stderr, "error: %s\n", e.c_str());
  for (const auto& w : d.warnings)
    std::fprintf(stderr, "warning: %s\n", w.c_str());
  if (!d.errors.empty()) return 1;
  return run_matrix(cfg, config_path, workers, dry_run, resume) > 0 ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2D PDE operator pretraining benchmark"};
  app.require_subcommand(1);

  std::string config_path, split = "pretrain", dist = "in", out = "data";
  std::vector<std::string> pde_names;
  int resolution = 32, count = 0, workers = 1;
  uint64_t seed = 0;
  size_t cell_index = 0;
  bool dry_run = false, resume = false;
  std::string records_file, task_filter;
  CellFilter filter;
  int rc = 0;

  auto* generate = app.add_subcommand(
      "generate", "write dataset containers (flags, or everything a config needs)");
  generate->add_option("--config", config_path, "experiment config file");
  generate->add_option("--split", split, "pretrain, finetune or validation");
  generate->add_option("--dist", dist, "in or out distribution");
  generate->add_option("--pdes", pde_names, "equations (default heat,advection,burgers)")
      ->delimiter(',');
  generate->add_option("--resolution", resolution, "spatial grid size");
  generate->add_option("--count", count, "trajectories per equation (0 = split default)");
  generate->add_option("--seed", seed, "master seed");
  generate->add_option("--out", out, "output directory");
  generate->callback([&] {
    rc = cmd_generate(config_path, split, dist, pde_names, resolution, count,
                      seed, out);
  });

  auto* validate = app.add_subcommand("validate", "check a config file");
  validate->add_option("--config", config_path, "experiment config file")
      ->required();
  validate->callback([&] { rc = cmd_validate(config_path); });

  auto* pretrain = app.add_subcommand(
      "pretrain", "write any missing pretraining checkpoints");
  pretrain->add_option("--config", config_path, "experiment config file")
      ->required();
  filter.add_options(pretrain);
  pretrain->callback([&] { rc = cmd_pretrain(config_path, filter); });

  auto* finetune = app.add_subcommand(
      "finetune", "run matching cells in this process");
  finetune->add_option("--config", config_path, "experiment config file")
      ->required();
  filter.add_options(finetune);
  finetune->callback([&] { rc = cmd_finetune(config_path, filter); });

  auto* report = app.add_subcommand("report", "render tables and plots");
  report->add_option("--records", records_file, "record log (JSON lines)")
      ->required();
  report->add_option("--task", task_filter, "restrict to one downstream task");
  report->add_option("--out", out, "output directory")->required();
  report->callback([&] { rc = cmd_report(records_file, task_filter, out); });

  auto* run = app.add_subcommand("run", "execute the full experiment matrix");
  run->add_option("--config", config_path, "experiment config file")
      ->required();
  run->add_option("--workers", workers, "worker process count");
  run->add_flag("--dry-run", dry_run, "print the plan, execute nothing");
  run->add_flag("--resume", resume,
                "skip completed cells (also the default behavior)");
  run->callback([&] { rc = cmd_run(config_path, workers, dry_run, resume); });

  auto* cell = app.add_subcommand("cell", "run one cell by plan index (internal)");
  cell->add_option("--config", config_path, "experiment config file")
      ->required();
  cell->add_option("--index", cell_index, "cell index in the plan")
      ->required();
  cell->callback([&] { rc = cmd_cell(config_path, cell_index); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const BenchError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return rc;
}
