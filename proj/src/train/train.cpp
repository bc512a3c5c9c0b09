#include "pdebench/train/train.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "pdebench/core/errors.hpp"
#include "pdebench/core/rng.hpp"
#include "pdebench/models/model.hpp"

namespace pdebench {

namespace {

torch::Tensor sample_norms(const torch::Tensor& t) {
  auto flat = t.reshape({t.size(0), -1});
  return flat.norm(2, /*dim=*/1);
}

}  // namespace

torch::Tensor relative_l2(const torch::Tensor& pred,
                          const torch::Tensor& target) {
  return relative_l2_per_sample(pred, target).mean();
}

torch::Tensor relative_l2_per_sample(const torch::Tensor& pred,
                                     const torch::Tensor& target) {
  if (pred.sizes() != target.sizes()) {
    throw ShapeError("relative_l2: prediction shape " +
                     std::to_string(pred.dim()) + "-d does not match target");
  }
  if (pred.dim() < 1 || pred.size(0) < 1) {
    throw ShapeError("relative_l2: expected a leading batch dimension");
  }
  auto tgt_norm = sample_norms(target);
  auto zero = (tgt_norm == 0).nonzero();
  if (zero.numel() > 0) {
    throw DegenerateTarget("relative_l2: target norm is zero for batch sample " +
                           std::to_string(zero[0].item<int64_t>()));
  }
  return sample_norms(pred - target) / tgt_norm;
}

double one_cycle_lr(double max_lr, int64_t step, int64_t total_steps,
                    double pct_start, double div_factor,
                    double final_div_factor) {
  if (total_steps < 2) throw ConfigError("one_cycle_lr: need >= 2 steps");
  if (step < 0 || step >= total_steps) {
    throw ConfigError("one_cycle_lr: step " + std::to_string(step) +
                      " outside schedule of " + std::to_string(total_steps));
  }
  const double initial = max_lr / div_factor;
  const double min_lr = initial / final_div_factor;
  int64_t up = static_cast<int64_t>(pct_start * total_steps) - 1;
  if (up < 1) up = 1;
  const int64_t down = total_steps - up - 1;

  auto anneal = [](double start, double end, double pct) {
    return end + (start - end) / 2.0 * (1.0 + std::cos(M_PI * pct));
  };
  if (step <= up) {
    return anneal(initial, max_lr, static_cast<double>(step) / up);
  }
  return anneal(max_lr, min_lr, static_cast<double>(step - up) / down);
}

double cosine_annealing_lr(double base_lr, int64_t epoch,
                           int64_t total_epochs) {
  if (total_epochs < 1) throw ConfigError("cosine_annealing_lr: empty schedule");
  if (epoch < 0 || epoch > total_epochs) {
    throw ConfigError("cosine_annealing_lr: epoch out of range");
  }
  return base_lr * 0.5 *
         (1.0 + std::cos(M_PI * static_cast<double>(epoch) / total_epochs));
}

void set_lr(torch::optim::Optimizer& opt, double lr) {
  for (auto& group : opt.param_groups()) {
    group.options().set_lr(lr);
  }
}

std::vector<int> seeded_subset(int pool_size, int n, uint64_t seed) {
  if (n < 0 || n > pool_size) {
    throw ConfigError("seeded_subset: requested " + std::to_string(n) +
                      " of " + std::to_string(pool_size) + " samples");
  }
  std::vector<int> idx(pool_size);
  for (int i = 0; i < pool_size; ++i) idx[i] = i;
  RngStream rng(seed);
  for (int i = 0; i < n; ++i) {
    int j = i + rng.uniform_int(pool_size - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(n);
  return idx;
}

std::vector<int> shuffled_indices(int n, uint64_t seed) {
  return seeded_subset(n, n, seed);
}

torch::Tensor volume_to_tensor(const VolumeF& v) {
  auto t = torch::empty({v.d0, v.d1, v.d2}, torch::kFloat32);
  std::memcpy(t.data_ptr<float>(), v.v.data(), v.size() * sizeof(float));
  return t;
}

torch::Tensor window_tensor(const Dataset& ds, const std::vector<int>& idx,
                            int start, int frames) {
  if (idx.empty()) throw ShapeError("window_tensor: empty index list");
  const auto& first = ds.items.at(static_cast<size_t>(idx[0])).u;
  if (start < 0 || start + frames > first.d0) {
    throw ShapeError("window_tensor: frames [" + std::to_string(start) + ", " +
                     std::to_string(start + frames) + ") outside trajectory of " +
                     std::to_string(first.d0));
  }
  auto out = torch::empty(
      {static_cast<int64_t>(idx.size()), frames, first.d1, first.d2},
      torch::kFloat32);
  const size_t plane = static_cast<size_t>(first.d1) * first.d2;
  for (size_t b = 0; b < idx.size(); ++b) {
    const auto& u = ds.items.at(static_cast<size_t>(idx[b])).u;
    if (!u.same_shape(first)) {
      throw ShapeError("window_tensor: mixed trajectory shapes in batch");
    }
    std::memcpy(out[static_cast<int64_t>(b)].data_ptr<float>(),
                u.plane(start), static_cast<size_t>(frames) * plane * sizeof(float));
  }
  return out;
}

torch::Tensor window_tensor_at(const Dataset& ds, const std::vector<int>& idx,
                               const std::vector<int>& starts, int frames) {
  if (idx.size() != starts.size()) {
    throw ShapeError("window_tensor_at: one start per item required");
  }
  std::vector<torch::Tensor> rows;
  rows.reserve(idx.size());
  for (size_t b = 0; b < idx.size(); ++b) {
    rows.push_back(window_tensor(ds, {idx[b]}, starts[b], frames));
  }
  return torch::cat(rows, 0);
}

torch::Tensor coords_for_leads(const GridSpec& g,
                               const std::vector<double>& leads,
                               torch::TensorOptions opts) {
  std::vector<torch::Tensor> rows;
  rows.reserve(leads.size());
  for (double lead : leads) {
    rows.push_back(make_coords(g, 1, lead, opts));
  }
  return torch::cat(rows, 0);
}

Dataset filter_pde(const Dataset& ds, PdeId pde) {
  Dataset out;
  out.grid = ds.grid;
  out.split = ds.split;
  out.dist = ds.dist;
  for (const auto& item : ds.items) {
    if (item.pde == pde) out.items.push_back(item);
  }
  return out;
}

}  // namespace pdebench
