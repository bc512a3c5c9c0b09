#include "pdebench/report/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include "pdebench/core/errors.hpp"
#include "pdebench/pretext/strategy.hpp"

namespace pdebench {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const std::vector<std::string>& pde_order() {
  static const std::vector<std::string> k = {"heat", "advection", "burgers",
                                             "navier_stokes"};
  return k;
}

const std::vector<std::string>& model_order() {
  static const std::vector<std::string> k = {"fno", "deeponet", "oformer",
                                             "unet"};
  return k;
}

const std::vector<std::string>& augmentation_order() {
  static const std::vector<std::string> k = {"noise", "shift", "scale"};
  return k;
}

std::vector<std::string> ordered(const std::set<std::string>& present,
                                 const std::vector<std::string>& canon) {
  std::vector<std::string> out;
  for (const auto& name : canon) {
    if (present.count(name)) out.push_back(name);
  }
  for (const auto& name : present) {
    if (std::find(canon.begin(), canon.end(), name) == canon.end()) {
      out.push_back(name);
    }
  }
  return out;
}

std::string column_label(const MetricRecord& r) {
  if (r.augmentation == "none" || r.augmentation.empty()) return r.strategy;
  return r.strategy + "+" + r.augmentation;
}

std::vector<std::string> column_canon() {
  std::vector<std::string> canon;
  for (const auto& s : strategy_names()) {
    canon.push_back(s);
    for (const auto& a : augmentation_order()) canon.push_back(s + "+" + a);
  }
  return canon;
}

// Mean of a cell for ranking purposes: all-diverged cells compare as inf.
double rank_value(const CellStats& c) { return c.count > 0 ? c.mean : kInf; }

const CellStats* find_cell(const ResultTable& t, const std::string& pde,
                           const std::string& model, const std::string& col) {
  auto it = t.cells.find(cell_key(pde, model, col));
  return it == t.cells.end() ? nullptr : &it->second;
}

std::string format_g(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

struct SvgPoint {
  int n = 0;
  double mean = 0.0, std = 0.0;
};

const char* palette(size_t i) {
  static const char* k[] = {"#444444", "#1f77b4", "#ff7f0e", "#2ca02c",
                            "#d62728", "#9467bd", "#8c564b", "#e377c2",
                            "#7f7f7f", "#17becf"};
  return k[i % 10];
}

}  // namespace

std::string cell_key(const std::string& pde, const std::string& model,
                     const std::string& column) {
  return pde + "|" + model + "|" + column;
}

ResultTable aggregate(const std::vector<MetricRecord>& records) {
  if (records.empty()) throw ConfigError("aggregate: no records");
  ResultTable t;
  t.task = records.front().task;
  t.distribution = records.front().distribution;
  t.n_samples = records.front().n_samples;

  std::set<std::string> pdes, models, columns;
  std::map<std::string, std::vector<double>> errors;
  for (const auto& r : records) {
    if (r.task != t.task || r.distribution != t.distribution ||
        r.n_samples != t.n_samples) {
      throw ConfigError("aggregate: records mix task/distribution/n_samples "
                        "groupings; filter before aggregating");
    }
    const auto col = column_label(r);
    pdes.insert(r.pde);
    models.insert(r.model);
    columns.insert(col);
    errors[cell_key(r.pde, r.model, col)].push_back(r.error);
  }
  t.pdes = ordered(pdes, pde_order());
  t.models = ordered(models, model_order());
  t.columns = ordered(columns, column_canon());

  for (const auto& [key, vals] : errors) {
    CellStats c;
    double sum = 0.0;
    for (double e : vals) {
      if (std::isfinite(e)) {
        sum += e;
        ++c.count;
      } else {
        ++c.diverged;
      }
    }
    if (c.count > 0) {
      c.mean = sum / c.count;
      double ss = 0.0;
      for (double e : vals) {
        if (std::isfinite(e)) ss += (e - c.mean) * (e - c.mean);
      }
      c.stddev = std::sqrt(ss / c.count);
    }
    t.cells.emplace(key, c);
  }

  for (const auto& p : t.pdes) {
    for (const auto& m : t.models) {
      for (const auto& col : t.columns) {
        if (!t.cells.count(cell_key(p, m, col))) {
          t.empty_cells.push_back(cell_key(p, m, col));
        }
      }
    }
  }
  return t;
}

double improvement_percent(double err_none, double err_best) {
  if (!(err_none > 0.0)) {
    throw DegenerateTarget("improvement_percent: baseline error must be "
                           "positive, got " + format_g(err_none));
  }
  return (err_none - err_best) / err_none * 100.0;
}

SummaryRow best_strategy(const ResultTable& table, const std::string& model,
                         const std::string& pde) {
  double best_val = kInf;
  std::string best;
  for (const auto& col : table.columns) {
    const auto* c = find_cell(table, pde, model, col);
    if (!c) {
      throw ConfigError("best_strategy: no records for " +
                        cell_key(pde, model, col));
    }
    const double v = rank_value(*c);
    const bool wins =
        v < best_val ||
        (v == best_val && (col == "none" || (best != "none" && col < best)));
    if (best.empty() || wins) {
      best_val = v;
      best = col;
    }
  }
  const auto* none = find_cell(table, pde, model, "none");
  if (!none) {
    throw ConfigError("best_strategy: no from-scratch baseline for " + pde +
                      "|" + model);
  }
  SummaryRow row;
  row.pde = pde;
  row.model = model;
  row.best = best;
  row.improvement = improvement_percent(rank_value(*none), best_val);
  return row;
}

double best_improvement_excluding_none(const ResultTable& table,
                                       const std::string& model,
                                       const std::string& pde) {
  const auto* none = find_cell(table, pde, model, "none");
  if (!none) {
    throw ConfigError("improvement: no from-scratch baseline for " + pde +
                      "|" + model);
  }
  double best_val = kInf;
  bool any = false;
  for (const auto& col : table.columns) {
    if (col == "none") continue;
    const auto* c = find_cell(table, pde, model, col);
    if (!c) continue;
    any = true;
    best_val = std::min(best_val, rank_value(*c));
  }
  if (!any) {
    throw ConfigError("improvement: no pretrained columns for " + pde + "|" +
                      model);
  }
  return improvement_percent(rank_value(*none), best_val);
}

std::string format_fixed(double v, int decimals) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

std::string format_sig4(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%#.4g", v);
  return buf;
}

std::string render_markdown(const ResultTable& table) {
  std::ostringstream out;
  out << "Normalized relative L2 (x 10^-1); cell = mean over seeds; "
         "**bold** = row best, *italic* = row second best.\n";
  out << "Task: " << table.task << " | distribution: " << table.distribution
      << " | fine-tune samples: " << table.n_samples << "\n\n";
  out << "| PDE | Model |";
  for (const auto& col : table.columns) out << " " << col << " |";
  out << "\n|---|---|";
  for (size_t i = 0; i < table.columns.size(); ++i) out << "---|";
  out << "\n";
  for (const auto& pde : table.pdes) {
    for (const auto& model : table.models) {
      double m1 = kInf, m2 = kInf;
      for (const auto& col : table.columns) {
        const auto* c = find_cell(table, pde, model, col);
        if (!c || c->count == 0) continue;
        if (c->mean < m1) {
          m2 = m1;
          m1 = c->mean;
        } else if (c->mean > m1 && c->mean < m2) {
          m2 = c->mean;
        }
      }
      out << "| " << pde << " | " << model << " |";
      for (const auto& col : table.columns) {
        const auto* c = find_cell(table, pde, model, col);
        if (!c) {
          out << " - |";
        } else if (c->count == 0) {
          out << " div |";
        } else {
          const auto shown = format_fixed(c->mean * table.display_scale, 3);
          if (c->mean == m1) {
            out << " **" << shown << "** |";
          } else if (c->mean == m2) {
            out << " *" << shown << "* |";
          } else {
            out << " " << shown << " |";
          }
        }
      }
      out << "\n";
    }
  }
  if (!table.empty_cells.empty()) {
    out << "\nEmpty cells (no records):";
    for (const auto& k : table.empty_cells) out << " " << k;
    out << "\n";
  }
  return out.str();
}

std::string render_csv(const ResultTable& table) {
  std::ostringstream out;
  out << "task,distribution,n_samples,pde,model,column,mean,stddev,count,"
         "diverged,display\n";
  for (const auto& pde : table.pdes) {
    for (const auto& model : table.models) {
      for (const auto& col : table.columns) {
        const auto* c = find_cell(table, pde, model, col);
        if (!c) continue;
        out << table.task << "," << table.distribution << ","
            << table.n_samples << "," << pde << "," << model << "," << col
            << ",";
        if (c->count > 0) {
          out << format_g(c->mean) << "," << format_g(c->stddev);
        } else {
          out << "inf,0";
        }
        out << "," << c->count << "," << c->diverged << ",";
        out << (c->count > 0
                    ? format_fixed(c->mean * table.display_scale, 3)
                    : "inf");
        out << "\n";
      }
    }
  }
  return out.str();
}

std::string render_best_summary(const ResultTable& table) {
  std::ostringstream out;
  out << "Best pretraining strategy per model (argmin over all columns; "
         "ties break toward none).\n\n| PDE |";
  for (const auto& m : table.models) out << " " << m << " |";
  out << "\n|---|";
  for (size_t i = 0; i < table.models.size(); ++i) out << "---|";
  out << "\n";
  for (const auto& pde : table.pdes) {
    out << "| " << pde << " |";
    for (const auto& model : table.models) {
      out << " " << best_strategy(table, model, pde).best << " |";
    }
    out << "\n";
  }
  out << "\nImprovement with the best strategy, percent vs from-scratch.\n\n"
         "| PDE |";
  for (const auto& m : table.models) out << " " << m << " |";
  out << "\n|---|";
  for (size_t i = 0; i < table.models.size(); ++i) out << "---|";
  out << "\n";
  for (const auto& pde : table.pdes) {
    out << "| " << pde << " |";
    for (const auto& model : table.models) {
      out << " " << format_sig4(best_strategy(table, model, pde).improvement)
          << " |";
    }
    out << "\n";
  }
  return out.str();
}

ScalingSummary scaling_summary(const std::vector<ResultTable>& by_n) {
  ScalingSummary s;
  std::set<std::string> models;
  for (const auto& t : by_n) {
    s.ns.push_back(t.n_samples);
    for (const auto& m : t.models) models.insert(m);
  }
  std::sort(s.ns.begin(), s.ns.end());
  s.models = ordered(models, model_order());
  for (const auto& t : by_n) {
    for (const auto& model : s.models) {
      const std::string key = model + "|" + std::to_string(t.n_samples);
      double sum = 0.0;
      int n_pdes = 0;
      bool ok = true;
      for (const auto& pde : t.pdes) {
        try {
          sum += best_improvement_excluding_none(t, model, pde);
          ++n_pdes;
        } catch (const BenchError&) {
          ok = false;
        }
      }
      if (!ok || n_pdes == 0) {
        s.missing.push_back(key);
      } else {
        s.improvement[key] = sum / n_pdes;
      }
    }
  }
  return s;
}

std::string render_scaling_summary(const ScalingSummary& s) {
  std::ostringstream out;
  out << "Best improvement over from-scratch (percent, averaged over "
         "equations) vs fine-tuning set size.\n\n| n |";
  for (const auto& m : s.models) out << " " << m << " |";
  out << "\n|---|";
  for (size_t i = 0; i < s.models.size(); ++i) out << "---|";
  out << "\n";
  for (int n : s.ns) {
    out << "| " << n << " |";
    for (const auto& m : s.models) {
      auto it = s.improvement.find(m + "|" + std::to_string(n));
      out << " " << (it == s.improvement.end() ? std::string("-")
                                               : format_sig4(it->second))
          << " |";
    }
    out << "\n";
  }
  if (!s.missing.empty()) {
    out << "\nMissing slices:";
    for (const auto& k : s.missing) out << " " << k;
    out << "\n";
  }
  return out.str();
}

GeneralizationSummary generalization_summary(
    const std::vector<std::pair<std::string, ResultTable>>& by_label) {
  GeneralizationSummary g;
  std::set<std::string> models;
  for (const auto& [label, t] : by_label) {
    g.labels.push_back(label);
    for (const auto& m : t.models) models.insert(m);
  }
  g.models = ordered(models, model_order());
  for (const auto& [label, t] : by_label) {
    for (const auto& model : g.models) {
      double sum = 0.0;
      int n_pdes = 0;
      for (const auto& pde : t.pdes) {
        sum += best_improvement_excluding_none(t, model, pde);
        ++n_pdes;
      }
      if (n_pdes > 0) g.improvement[model + "|" + label] = sum / n_pdes;
    }
  }
  return g;
}

std::string render_generalization_summary(const GeneralizationSummary& g) {
  std::ostringstream out;
  out << "Best improvement over from-scratch (percent) by downstream "
         "distribution.\n\n| Model |";
  for (const auto& l : g.labels) out << " " << l << " |";
  out << "\n|---|";
  for (size_t i = 0; i < g.labels.size(); ++i) out << "---|";
  out << "\n";
  for (const auto& m : g.models) {
    out << "| " << m << " |";
    for (const auto& l : g.labels) {
      auto it = g.improvement.find(m + "|" + l);
      out << " " << (it == g.improvement.end() ? std::string("-")
                                               : format_sig4(it->second))
          << " |";
    }
    out << "\n";
  }
  return out.str();
}

std::string render_scaling_csv(const std::vector<ResultTable>& by_n,
                               const std::string& model,
                               const std::string& pde) {
  std::ostringstream out;
  out << "model,pde,column,n,mean,stddev,count,diverged\n";
  std::set<std::string> cols;
  for (const auto& t : by_n) {
    for (const auto& c : t.columns) cols.insert(c);
  }
  for (const auto& col : ordered(cols, column_canon())) {
    for (const auto& t : by_n) {
      const auto* c = find_cell(t, pde, model, col);
      if (!c) continue;
      out << model << "," << pde << "," << col << "," << t.n_samples << ",";
      if (c->count > 0) {
        out << format_g(c->mean) << "," << format_g(c->stddev);
      } else {
        out << "inf,0";
      }
      out << "," << c->count << "," << c->diverged << "\n";
    }
  }
  return out.str();
}

std::string render_scaling_svg(const std::vector<ResultTable>& by_n,
                               const std::string& model,
                               const std::string& pde) {
  struct Series {
    std::string column;
    std::vector<SvgPoint> points;
  };
  std::set<std::string> cols;
  for (const auto& t : by_n) {
    for (const auto& c : t.columns) cols.insert(c);
  }
  std::vector<Series> series;
  int max_n = 1;
  double max_y = 0.0;
  for (const auto& col : ordered(cols, column_canon())) {
    Series s{col, {}};
    for (const auto& t : by_n) {
      const auto* c = find_cell(t, pde, model, col);
      if (!c || c->count == 0) continue;
      s.points.push_back({t.n_samples, c->mean, c->stddev});
      max_n = std::max(max_n, t.n_samples);
      max_y = std::max(max_y, c->mean + c->stddev);
    }
    std::sort(s.points.begin(), s.points.end(),
              [](const SvgPoint& a, const SvgPoint& b) { return a.n < b.n; });
    if (!s.points.empty()) series.push_back(std::move(s));
  }
  if (max_y <= 0.0) max_y = 1.0;

  const double w = 640, h = 420, ml = 70, mr = 170, mt = 40, mb = 50;
  const double pw = w - ml - mr, ph = h - mt - mb;
  auto sx = [&](double n) { return ml + pw * n / (1.05 * max_n); };
  auto sy = [&](double v) { return mt + ph * (1.0 - v / (1.1 * max_y)); };
  auto num = [](double v) { return format_fixed(v, 2); };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << " " << h
      << "\">\n";
  out << "<rect width=\"" << w << "\" height=\"" << h
      << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << num(ml) << "\" y=\"24\" font-family=\"sans-serif\" "
         "font-size=\"14\">" << pde << " / " << model
      << ": error vs fine-tune samples (bars: 1 std-dev)</text>\n";
  out << "<line x1=\"" << num(ml) << "\" y1=\"" << num(mt + ph) << "\" x2=\""
      << num(ml + pw) << "\" y2=\"" << num(mt + ph)
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << num(ml) << "\" y1=\"" << num(mt) << "\" x2=\""
      << num(ml) << "\" y2=\"" << num(mt + ph) << "\" stroke=\"black\"/>\n";

  std::set<int> ticks;
  for (const auto& s : series) {
    for (const auto& p : s.points) ticks.insert(p.n);
  }
  for (int n : ticks) {
    out << "<line x1=\"" << num(sx(n)) << "\" y1=\"" << num(mt + ph)
        << "\" x2=\"" << num(sx(n)) << "\" y2=\"" << num(mt + ph + 5)
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(sx(n)) << "\" y=\"" << num(mt + ph + 20)
        << "\" font-family=\"sans-serif\" font-size=\"11\" "
           "text-anchor=\"middle\">" << n << "</text>\n";
  }
  for (int i = 0; i <= 5; ++i) {
    const double v = 1.1 * max_y * i / 5.0;
    out << "<line x1=\"" << num(ml - 5) << "\" y1=\"" << num(sy(v))
        << "\" x2=\"" << num(ml) << "\" y2=\"" << num(sy(v))
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(ml - 9) << "\" y=\"" << num(sy(v) + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\" "
           "text-anchor=\"end\">" << format_fixed(v, 3) << "</text>\n";
  }
  out << "<text x=\"" << num(ml + pw / 2) << "\" y=\"" << num(h - 12)
      << "\" font-family=\"sans-serif\" font-size=\"12\" "
         "text-anchor=\"middle\">fine-tune samples</text>\n";

  for (size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = palette(si);
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& p : s.points) {
      out << num(sx(p.n)) << "," << num(sy(p.mean)) << " ";
    }
    out << "\"/>\n";
    for (const auto& p : s.points) {
      out << "<line x1=\"" << num(sx(p.n)) << "\" y1=\""
          << num(sy(p.mean - p.std)) << "\" x2=\"" << num(sx(p.n))
          << "\" y2=\"" << num(sy(p.mean + p.std)) << "\" stroke=\"" << color
          << "\"/>\n";
      out << "<circle cx=\"" << num(sx(p.n)) << "\" cy=\"" << num(sy(p.mean))
          << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
    }
    const double ly = mt + 16.0 * static_cast<double>(si);
    out << "<line x1=\"" << num(ml + pw + 10) << "\" y1=\"" << num(ly)
        << "\" x2=\"" << num(ml + pw + 30) << "\" y2=\"" << num(ly)
        << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    out << "<text x=\"" << num(ml + pw + 35) << "\" y=\"" << num(ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.column
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace pdebench
