#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pdebench {

// One evaluation result: the atom of every report table. `wall_clock_sec`
// is provenance only and excluded from record comparisons.
struct MetricRecord {
  std::string model;
  std::string strategy = "none";
  std::string augmentation = "none";
  std::string pde;
  std::string distribution = "in";
  std::string task;
  int n_samples = 0;
  uint64_t seed = 0;
  double error = 0.0;  // relative L2; +inf when the rollout diverged
  bool diverged = false;
  double wall_clock_sec = 0.0;
  std::string config_hash;
};

// Field-wise equality, ignoring wall_clock_sec.
bool same_measurement(const MetricRecord& a, const MetricRecord& b);

std::string record_to_json_line(const MetricRecord& r);
MetricRecord record_from_json_line(const std::string& line);

// Appends each record as one JSON line (single write per line, so
// concurrent appenders interleave at line granularity).
void append_records(const std::string& path,
                    const std::vector<MetricRecord>& records);

// Reads every record; IoError names the offending line on parse failure.
std::vector<MetricRecord> read_records(const std::string& path);

}  // namespace pdebench
