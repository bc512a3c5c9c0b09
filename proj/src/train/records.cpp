#include "pdebench/train/records.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "pdebench/core/errors.hpp"

namespace pdebench {

bool same_measurement(const MetricRecord& a, const MetricRecord& b) {
  const bool errors_equal =
      (std::isinf(a.error) && std::isinf(b.error)) || a.error == b.error;
  return a.model == b.model && a.strategy == b.strategy &&
         a.augmentation == b.augmentation && a.pde == b.pde &&
         a.distribution == b.distribution && a.task == b.task &&
         a.n_samples == b.n_samples && a.seed == b.seed && errors_equal &&
         a.diverged == b.diverged && a.config_hash == b.config_hash;
}

std::string record_to_json_line(const MetricRecord& r) {
  nlohmann::json j{{"model", r.model},
                   {"strategy", r.strategy},
                   {"augmentation", r.augmentation},
                   {"pde", r.pde},
                   {"distribution", r.distribution},
                   {"task", r.task},
                   {"n_samples", r.n_samples},
                   {"seed", r.seed},
                   {"diverged", r.diverged},
                   {"wall_clock_sec", r.wall_clock_sec},
                   {"config_hash", r.config_hash}};
  // JSON has no infinity literal; a diverged error is stored as null.
  if (std::isfinite(r.error))
    j["error"] = r.error;
  else
    j["error"] = nullptr;
  return j.dump();
}

MetricRecord record_from_json_line(const std::string& line) {
  const auto j = nlohmann::json::parse(line);
  MetricRecord r;
  r.model = j.at("model").get<std::string>();
  r.strategy = j.value("strategy", "none");
  r.augmentation = j.value("augmentation", "none");
  r.pde = j.at("pde").get<std::string>();
  r.distribution = j.value("distribution", "in");
  r.task = j.at("task").get<std::string>();
  r.n_samples = j.value("n_samples", 0);
  r.seed = j.value("seed", uint64_t{0});
  r.diverged = j.value("diverged", false);
  r.wall_clock_sec = j.value("wall_clock_sec", 0.0);
  r.config_hash = j.value("config_hash", "");
  if (j.contains("error") && !j.at("error").is_null())
    r.error = j.at("error").get<double>();
  else
    r.error = std::numeric_limits<double>::infinity();
  return r;
}

void append_records(const std::string& path,
                    const std::vector<MetricRecord>& records) {
  std::ofstream out(path, std::ios::app | std::ios::binary);
  if (!out) throw IoError("cannot open record log " + path);
  for (const auto& r : records) {
    const std::string line = record_to_json_line(r) + "\n";
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
  }
  out.flush();
  if (!out) throw IoError("failed writing record log " + path);
}

std::vector<MetricRecord> read_records(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open record log " + path);
  std::vector<MetricRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      records.push_back(record_from_json_line(line));
    } catch (const std::exception& e) {
      throw IoError(path + ":" + std::to_string(line_no) +
                    ": bad record line (" + e.what() + ")");
    }
  }
  return records;
}

}  // namespace pdebench
