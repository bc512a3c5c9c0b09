#pragma once

#include <map>
#include <string>
#include <vector>

#include "pdebench/train/records.hpp"

namespace pdebench {

struct CellStats {
  int count = 0;     // finite-error records entering mean/std
  int diverged = 0;  // infinite-error records, excluded from the stats
  double mean = 0.0;
  double stddev = 0.0;  // population std-dev over the finite errors
};

// Aggregated (PDE x model) x column grid, where a column is a strategy or,
// when augmented records are present, strategy+augmentation. Cell values are
// displayed scaled by display_scale (x 10^-1 convention: shown = 10 * mean).
struct ResultTable {
  std::string task;
  std::string distribution;
  int n_samples = 0;
  std::vector<std::string> pdes;
  std::vector<std::string> models;
  std::vector<std::string> columns;
  std::map<std::string, CellStats> cells;  // "pde|model|column"
  std::vector<std::string> empty_cells;    // flagged, not fatal
  double display_scale = 10.0;
};

struct SummaryRow {
  std::string pde;
  std::string model;
  std::string best;
  double improvement = 0.0;  // percent vs the from-scratch baseline
};

std::string cell_key(const std::string& pde, const std::string& model,
                     const std::string& column);

// Group records sharing (task, distribution, n_samples) into a table.
// Mixed groupings are rejected (ConfigError); canonical axis order.
ResultTable aggregate(const std::vector<MetricRecord>& records);

// (err_none - err_best) / err_none * 100; negative when the baseline wins.
double improvement_percent(double err_none, double err_best);

// Argmin over all columns including the baseline; ties break toward "none",
// then lexicographically. The slice must be complete.
SummaryRow best_strategy(const ResultTable& table, const std::string& model,
                         const std::string& pde);

// Best improvement over "none" among the pretrained columns only.
double best_improvement_excluding_none(const ResultTable& table,
                                       const std::string& model,
                                       const std::string& pde);

// Markdown with the row minimum bold and the second minimum italic;
// CSV twin carries mean/std/count/diverged per cell unscaled.
std::string render_markdown(const ResultTable& table);
std::string render_csv(const ResultTable& table);

// Best-strategy summary (Table 1 layout): one row per PDE, one column pair
// per model (best strategy, improvement percent at 4 significant digits).
std::string render_best_summary(const ResultTable& table);

// Improvement percent vs training-set size, averaged over the PDEs of each
// table (best pretrained column per PDE). Keyed "model|n".
struct ScalingSummary {
  std::vector<int> ns;
  std::vector<std::string> models;
  std::map<std::string, double> improvement;
  std::vector<std::string> missing;  // "model|n" slices without records
};

ScalingSummary scaling_summary(const std::vector<ResultTable>& by_n);
std::string render_scaling_summary(const ScalingSummary& s);

// Per-model best improvement for the in/out generalization tables plus the
// vorticity dataset (single-PDE column). Keyed "model|label".
struct GeneralizationSummary {
  std::vector<std::string> labels;  // column order
  std::vector<std::string> models;
  std::map<std::string, double> improvement;
};

GeneralizationSummary generalization_summary(
    const std::vector<std::pair<std::string, ResultTable>>& by_label);
std::string render_generalization_summary(const GeneralizationSummary& s);

// Error-vs-n line plot for one (model, pde) slice: one polyline per column
// with 1-sigma bars. Deterministic output; a CSV twin carries the numbers.
std::string render_scaling_svg(const std::vector<ResultTable>& by_n,
                               const std::string& model,
                               const std::string& pde);
std::string render_scaling_csv(const std::vector<ResultTable>& by_n,
                               const std::string& model,
                               const std::string& pde);

// Fixed-precision numeric formatting used across all report artifacts.
std::string format_fixed(double v, int decimals);   // "%.Nf", inf -> "inf"
std::string format_sig4(double v);                  // 4 significant digits

}  // namespace pdebench
