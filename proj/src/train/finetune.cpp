#include "pdebench/train/finetune.hpp"

#include <algorithm>
#include <string>

#include "pdebench/core/errors.hpp"
#include "pdebench/core/rng.hpp"
#include "pdebench/train/train.hpp"

namespace pdebench {

namespace {

void require_autoregressive(const ModelConfig& cfg) {
  if (cfg.out_frames != cfg.in_frames) {
    throw ConfigError("autoregressive training needs out_frames == in_frames, "
                      "got " + std::to_string(cfg.out_frames) + " vs " +
                      std::to_string(cfg.in_frames));
  }
}

torch::Tensor fixed_future_loss(OperatorModel& model, const Dataset& ds,
                                const std::vector<int>& idx, int future_frame) {
  const auto& cfg = model.config();
  if (cfg.out_frames != 1) {
    throw ConfigError("fixed-future training needs a single-frame model, got "
                      "out_frames = " + std::to_string(cfg.out_frames));
  }
  auto input = window_tensor(ds, idx, 0, cfg.in_frames);
  auto target = window_tensor(ds, idx, future_frame, 1);
  auto pred = model.forward(
      input,
      make_coords(ds.grid, static_cast<int>(idx.size()), 0.0, input.options()));
  return relative_l2(pred, target);
}

torch::Tensor autoregressive_loss(OperatorModel& model, const Dataset& ds,
                                  const std::vector<int>& idx,
                                  const FinetuneSpec& spec, RngStream& windows) {
  require_autoregressive(model.config());
  const int f = model.config().in_frames;
  const int last = ds.grid.n_t - 1;
  const int span = spec.pushforward ? 3 * f : 2 * f;
  const int choices = (ds.grid.n_t - span) / f + 1;

  std::vector<int> starts;
  std::vector<double> lead0, lead1;
  for (size_t i = 0; i < idx.size(); ++i) {
    const int t0 = f * windows.uniform_int(choices);
    starts.push_back(t0);
    lead0.push_back(static_cast<double>(t0) / last);
    lead1.push_back(static_cast<double>(t0 + f) / last);
  }
  auto input = window_tensor_at(ds, idx, starts, f);

  if (!spec.pushforward) {
    std::vector<int> target_starts;
    for (int t0 : starts) target_starts.push_back(t0 + f);
    auto target = window_tensor_at(ds, idx, target_starts, f);
    auto pred = model.forward(
        input, coords_for_leads(ds.grid, lead0, input.options()));
    return relative_l2(pred, target);
  }

  torch::Tensor first;
  {
    torch::NoGradGuard no_grad;
    first =
        model.forward(input, coords_for_leads(ds.grid, lead0, input.options()));
  }
  std::vector<int> target_starts;
  for (int t0 : starts) target_starts.push_back(t0 + 2 * f);
  auto target = window_tensor_at(ds, idx, target_starts, f);
  auto pred =
      model.forward(first, coords_for_leads(ds.grid, lead1, input.options()));
  return relative_l2(pred, target);
}

}  // namespace

std::vector<double> finetune(OperatorModel& model, const Dataset& pool,
                             const FinetuneSpec& spec) {
  if (spec.epochs < 1) throw ConfigError("finetune: epochs < 1");
  if (spec.batch_size < 1) throw ConfigError("finetune: batch_size < 1");
  auto subset = seeded_subset(static_cast<int>(pool.items.size()),
                              spec.n_samples, hash_str(spec.seed, "ft-subset"));

  torch::optim::Adam opt(model.parameters(),
                         torch::optim::AdamOptions(spec.lr).weight_decay(
                             spec.weight_decay));
  const uint64_t shuffle_base = hash_str(spec.seed, "ft-shuffle");
  const uint64_t window_base = hash_str(spec.seed, "ft-windows");
  const int n = static_cast<int>(subset.size());

  std::vector<double> epoch_losses;
  model.train();
  for (int epoch = 0; epoch < spec.epochs; ++epoch) {
    set_lr(opt, cosine_annealing_lr(spec.lr, epoch, spec.epochs));
    auto order = shuffled_indices(
        n, hash_combine(shuffle_base, static_cast<uint64_t>(epoch)));
    RngStream windows(
        hash_combine(window_base, static_cast<uint64_t>(epoch)));
    double loss_sum = 0.0;
    int batches = 0;
    for (int begin = 0; begin < n; begin += spec.batch_size) {
      const int end = std::min(begin + spec.batch_size, n);
      std::vector<int> idx;
      for (int i = begin; i < end; ++i) idx.push_back(subset[order[i]]);
      opt.zero_grad();
      try {
        auto loss = spec.task == DownstreamTask::fixed_future
                        ? fixed_future_loss(model, pool, idx,
                                            spec.fixed_future_frame)
                        : autoregressive_loss(model, pool, idx, spec, windows);
        loss.backward();
        opt.step();
        loss_sum += loss.item<double>();
      } catch (const NonFiniteError& e) {
        throw NonFiniteError("finetune epoch " + std::to_string(epoch) +
                             ", batch " + std::to_string(batches) + ": " +
                             e.what());
      }
      ++batches;
    }
    epoch_losses.push_back(loss_sum / std::max(batches, 1));
  }
  return epoch_losses;
}

double evaluate_fixed_future(OperatorModel& model, const Dataset& val,
                             int future_frame, int batch_size) {
  if (val.items.empty()) throw ConfigError("evaluate: empty dataset");
  torch::NoGradGuard no_grad;
  model.eval();
  const int n = static_cast<int>(val.items.size());
  double sum = 0.0;
  for (int begin = 0; begin < n; begin += batch_size) {
    const int end = std::min(begin + batch_size, n);
    std::vector<int> idx;
    for (int i = begin; i < end; ++i) idx.push_back(i);
    auto per_sample = relative_l2_per_sample(
        model.forward(window_tensor(val, idx, 0, model.config().in_frames),
                      make_coords(val.grid, end - begin, 0.0)),
        window_tensor(val, idx, future_frame, 1));
    sum += per_sample.sum().item<double>();
  }
  model.train();
  return sum / n;
}

double evaluate_autoregressive(OperatorModel& model, const Dataset& val,
                               int batch_size) {
  if (val.items.empty()) throw ConfigError("evaluate: empty dataset");
  require_autoregressive(model.config());
  torch::NoGradGuard no_grad;
  model.eval();
  const int f = model.config().in_frames;
  const int last = val.grid.n_t - 1;
  const int windows = (val.grid.n_t - f) / f;
  const int n = static_cast<int>(val.items.size());
  double sum = 0.0;
  for (int begin = 0; begin < n; begin += batch_size) {
    const int end = std::min(begin + batch_size, n);
    std::vector<int> idx;
    for (int i = begin; i < end; ++i) idx.push_back(i);
    auto state = window_tensor(val, idx, 0, f);
    auto total = torch::zeros({end - begin});
    for (int w = 0; w < windows; ++w) {
      auto coords = make_coords(val.grid, end - begin,
                                static_cast<double>(w * f) / last);
      state = model.forward(state, coords);
      total = total + relative_l2_per_sample(
                          state, window_tensor(val, idx, (w + 1) * f, f));
    }
    sum += total.sum().item<double>();
  }
  model.train();
  return sum / n;
}

FinetuneOutcome finetune_and_evaluate(OperatorModel& model,
                                      const Dataset& pool, const Dataset& val,
                                      const FinetuneSpec& spec) {
  FinetuneOutcome out;
  try {
    out.epoch_losses = finetune(model, pool, spec);
    out.error = spec.task == DownstreamTask::fixed_future
                    ? evaluate_fixed_future(model, val, spec.fixed_future_frame,
                                            spec.batch_size)
                    : evaluate_autoregressive(model, val, spec.batch_size);
    out.diverged = !std::isfinite(out.error);
    if (out.diverged) out.error = std::numeric_limits<double>::infinity();
  } catch (const NonFiniteError&) {
    out.diverged = true;
    out.error = std::numeric_limits<double>::infinity();
  }
  return out;
}

torch::Tensor pushforward_step_loss(OperatorModel& model,
                                    const torch::Tensor& window,
                                    const torch::Tensor& target,
                                    const GridSpec& g, int t0,
                                    torch::Tensor* first_pass_out,
                                    const torch::Tensor* injected_first) {
  require_autoregressive(model.config());
  const int f = model.config().in_frames;
  const int last = g.n_t - 1;
  const auto batch = static_cast<int>(window.size(0));

  torch::Tensor first;
  if (injected_first) {
    first = *injected_first;
  } else {
    torch::NoGradGuard no_grad;
    first = model.forward(
        window, make_coords(g, batch, static_cast<double>(t0) / last,
                            window.options()));
  }
  if (first_pass_out) *first_pass_out = first;
  auto pred = model.forward(
      first, make_coords(g, batch, static_cast<double>(t0 + f) / last,
                         window.options()));
  return relative_l2(pred, target);
}

}  // namespace pdebench
