#include "pdebench/train/pretrain.hpp"

#include <cstring>
#include <string>
#include <utility>

#include "pdebench/core/errors.hpp"
#include "pdebench/core/rng.hpp"
#include "pdebench/pretext/permutation.hpp"
#include "pdebench/pretext/tasks.hpp"
#include "pdebench/train/picl.hpp"
#include "pdebench/train/train.hpp"

namespace pdebench {

namespace {

struct PretextContext {
  uint64_t label_base = 0;         // per-position stream root
  std::vector<Perm> jigsaw;        // jigsaw permutation bank
  VolumeF zero_token;              // builder-side stand-in for the mask token
  PatchSpec mask_patch;
  int n_t = 0;
};

torch::Tensor mask_to_tensor(const Tensor3<uint8_t>& m) {
  auto t = torch::empty({m.d0, m.d1, m.d2}, torch::kUInt8);
  std::memcpy(t.data_ptr<uint8_t>(), m.v.data(), m.size());
  return t.to(torch::kFloat32);
}

RngStream position_stream(const PretextContext& ctx, int position) {
  return RngStream(
      hash_combine(ctx.label_base, static_cast<uint64_t>(position)));
}

// Backbone over the disjoint in_frames-wide windows of a full trajectory,
// outputs concatenated along channels (window w gets lead w * in_frames /
// (n_t - 1)), then the projection head.
torch::Tensor whole_trajectory_logits(OperatorModel& model,
                                      const torch::Tensor& full,
                                      const GridSpec& g) {
  const auto& cfg = model.config();
  const int n_t = static_cast<int>(full.size(1));
  if (n_t % cfg.in_frames != 0) {
    throw ShapeError("pretraining: trajectory length " + std::to_string(n_t) +
                     " is not a multiple of in_frames " +
                     std::to_string(cfg.in_frames));
  }
  if (!model.head) throw ConfigError("pretraining: no projection head attached");
  const int windows = n_t / cfg.in_frames;
  const auto batch = static_cast<int>(full.size(0));
  std::vector<torch::Tensor> feats;
  feats.reserve(static_cast<size_t>(windows));
  for (int w = 0; w < windows; ++w) {
    const double lead =
        static_cast<double>(w * cfg.in_frames) / (g.n_t - 1);
    auto coords = make_coords(g, batch, lead, full.options());
    feats.push_back(
        model.backbone(full.narrow(1, w * cfg.in_frames, cfg.in_frames), coords));
  }
  auto stacked = torch::cat(feats, 1);
  require_finite(stacked, "pretext backbone features");
  auto out = model.head->forward(stacked);
  require_finite(out, "pretext head output");
  return out;
}

torch::Tensor classification_loss(OperatorModel& model, const Dataset& ds,
                                  const std::vector<int>& idx,
                                  const PretrainSpec& spec,
                                  const PretextContext& ctx) {
  std::vector<torch::Tensor> inputs;
  std::vector<int64_t> labels;
  inputs.reserve(idx.size());
  labels.reserve(idx.size());
  for (int position : idx) {
    auto rng = position_stream(ctx, position);
    const auto& traj = ds.items.at(static_cast<size_t>(position));
    PretextBatch b;
    switch (spec.strategy) {
      case Strategy::binary:
        b = build_binary(traj, model.config().in_frames, rng);
        break;
      case Strategy::timesort:
        b = build_sort(traj, SortAxis::time, rng);
        break;
      case Strategy::spacesort:
        b = build_sort(traj, SortAxis::space_x, rng);
        break;
      case Strategy::jigsaw:
        b = build_jigsaw(traj, ctx.jigsaw,
                         PatchSpec::jigsaw_default(traj.u.d0, traj.u.d1,
                                                   traj.u.d2),
                         rng);
        break;
      default:
        throw ConfigError("pretraining: not a classification strategy");
    }
    inputs.push_back(volume_to_tensor(b.input));
    labels.push_back(b.label);
  }
  auto full = torch::stack(inputs, 0);
  auto logits = whole_trajectory_logits(model, full, ds.grid);
  auto target = torch::tensor(labels, torch::kInt64);
  if (spec.strategy == Strategy::binary) {
    return torch::nn::functional::binary_cross_entropy_with_logits(
        logits.squeeze(1), target.to(torch::kFloat32));
  }
  return torch::nn::functional::cross_entropy(logits, target);
}

torch::Tensor coefficient_loss(OperatorModel& model, const Dataset& ds,
                               const std::vector<int>& idx) {
  std::vector<torch::Tensor> inputs, targets;
  for (int position : idx) {
    auto b = build_coefficient(ds.items.at(static_cast<size_t>(position)));
    inputs.push_back(volume_to_tensor(b.input));
    targets.push_back(torch::tensor(b.target_vec, torch::kFloat32));
  }
  auto logits = whole_trajectory_logits(model, torch::stack(inputs, 0), ds.grid);
  return torch::mse_loss(logits, torch::stack(targets, 0));
}

torch::Tensor derivative_loss(OperatorModel& model, const Dataset& ds,
                              const std::vector<int>& idx,
                              const PretextContext& ctx) {
  const auto& cfg = model.config();
  if (cfg.in_frames != 8) {
    throw ConfigError("pretraining: the derivative task runs on 8-frame "
                      "windows");
  }
  std::vector<torch::Tensor> inputs, targets;
  std::vector<double> leads;
  for (int position : idx) {
    auto rng = position_stream(ctx, position);
    const int start = cfg.in_frames * rng.uniform_int(ctx.n_t / cfg.in_frames);
    auto b = build_derivative(ds.items.at(static_cast<size_t>(position)),
                              ds.grid, start);
    inputs.push_back(volume_to_tensor(b.input));
    targets.push_back(volume_to_tensor(b.target_field));
    leads.push_back(static_cast<double>(start) / (ds.grid.n_t - 1));
  }
  auto input = torch::stack(inputs, 0);
  auto pred = model.forward(input, coords_for_leads(ds.grid, leads,
                                                    input.options()));
  return torch::mse_loss(pred, torch::stack(targets, 0));
}

torch::Tensor masked_loss(OperatorModel& model, const Dataset& ds,
                          const std::vector<int>& idx,
                          const PretrainSpec& spec, const PretextContext& ctx,
                          const torch::Tensor* token) {
  std::vector<torch::Tensor> inputs, masks, targets;
  for (int position : idx) {
    auto rng = position_stream(ctx, position);
    auto b = build_masked(ds.items.at(static_cast<size_t>(position)),
                          ctx.mask_patch, spec.mask_ratio, ctx.zero_token, rng);
    inputs.push_back(volume_to_tensor(b.input));
    masks.push_back(mask_to_tensor(b.mask));
    targets.push_back(volume_to_tensor(b.target_field));
  }
  // Builders blank the masked positions, so adding token * mask composes
  // u * (1 - mask) + token * mask differentiably.
  auto input = torch::stack(inputs, 0);
  if (token) {
    const auto& p = ctx.mask_patch;
    auto tiled = token->repeat({ctx.n_t / p.t, ds.grid.n_x / p.x,
                                ds.grid.n_y / p.y});
    input = input + tiled.unsqueeze(0) * torch::stack(masks, 0);
  }
  auto recon = whole_trajectory_logits(model, input, ds.grid);
  return torch::mse_loss(recon, torch::stack(targets, 0));
}

torch::Tensor transfer_loss(OperatorModel& model, const Dataset& ds,
                            const std::vector<int>& idx,
                            const PretrainSpec& spec,
                            const PretextContext& ctx) {
  const auto& cfg = model.config();
  const int last = ds.grid.n_t - 1;
  if (spec.task == DownstreamTask::fixed_future) {
    if (cfg.out_frames != 1) {
      throw ConfigError("pretraining: fixed-future transfer needs a "
                        "single-frame model");
    }
    auto input = window_tensor(ds, idx, 0, cfg.in_frames);
    auto target = window_tensor(ds, idx, spec.fixed_future_frame, 1);
    auto pred = model.forward(
        input, make_coords(ds.grid, static_cast<int>(idx.size()), 0.0,
                           input.options()));
    return relative_l2(pred, target);
  }

  if (cfg.out_frames != cfg.in_frames) {
    throw ConfigError("pretraining: autoregressive transfer needs "
                      "out_frames == in_frames");
  }
  const int f = cfg.in_frames;
  std::vector<int> starts;
  std::vector<double> lead0, lead1;
  for (int position : idx) {
    auto rng = position_stream(ctx, position);
    const int t0 = f * rng.uniform_int((ctx.n_t - 2 * f) / f);
    starts.push_back(t0);
    lead0.push_back(static_cast<double>(t0) / last);
    lead1.push_back(static_cast<double>(t0 + f) / last);
  }
  auto input = window_tensor_at(ds, idx, starts, f);
  torch::Tensor first;
  {
    torch::NoGradGuard no_grad;
    first = model.forward(input,
                          coords_for_leads(ds.grid, lead0, input.options()));
  }
  std::vector<int> target_starts;
  for (int t0 : starts) target_starts.push_back(t0 + 2 * f);
  auto target = window_tensor_at(ds, idx, target_starts, f);
  auto pred = model.forward(first,
                            coords_for_leads(ds.grid, lead1, input.options()));
  return relative_l2(pred, target);
}

torch::Tensor strategy_loss(OperatorModel& model, const Dataset& ds,
                            const std::vector<int>& idx,
                            const PretrainSpec& spec, const PretextContext& ctx,
                            const torch::Tensor* token,
                            int64_t* degenerate_pairs) {
  switch (spec.strategy) {
    case Strategy::binary:
    case Strategy::timesort:
    case Strategy::spacesort:
    case Strategy::jigsaw:
      return classification_loss(model, ds, idx, spec, ctx);
    case Strategy::coefficient:
      return coefficient_loss(model, ds, idx);
    case Strategy::derivative:
      return derivative_loss(model, ds, idx, ctx);
    case Strategy::masked:
      return masked_loss(model, ds, idx, spec, ctx, token);
    case Strategy::picl:
      return picl_loss(model, ds, idx, spec.picl_tau, degenerate_pairs);
    case Strategy::transfer:
      return transfer_loss(model, ds, idx, spec, ctx);
    case Strategy::none:
      break;
  }
  throw ConfigError("pretraining: strategy 'none' has no objective");
}

PretextContext make_context(const Dataset& ds, const PretrainSpec& spec) {
  if (ds.items.empty()) throw ConfigError("pretraining: empty dataset");
  PretextContext ctx;
  ctx.label_base = hash_str(spec.seed, "pretext-labels");
  ctx.n_t = ds.items.front().u.d0;
  const auto& u = ds.items.front().u;
  if (spec.strategy == Strategy::jigsaw) {
    const auto patch = PatchSpec::jigsaw_default(u.d0, u.d1, u.d2);
    if (spec.jigsaw_bank_size < 2) {
      throw ConfigError("pretraining: jigsaw bank needs at least 2 entries");
    }
    ctx.jigsaw = jigsaw_bank(patch_count(u, patch), spec.jigsaw_bank_size);
  }
  if (spec.strategy == Strategy::masked) {
    ctx.mask_patch = PatchSpec::masked_default(u.d0, u.d1, u.d2);
    ctx.zero_token = VolumeF(ctx.mask_patch.t, ctx.mask_patch.x,
                             ctx.mask_patch.y, 0.0f);
    if (spec.mask_ratio <= 0.0 || spec.mask_ratio > 1.0) {
      throw ConfigError("pretraining: mask_ratio must lie in (0, 1]");
    }
  }
  return ctx;
}

}  // namespace

int resolve_pretrain_epochs(const PretrainSpec& spec) {
  if (spec.epochs > 0) return spec.epochs;
  if (spec.epochs < 0) throw ConfigError("pretraining: negative epoch count");
  return spec.strategy == Strategy::binary ? 100 : 200;
}

PretrainResult pretrain(OperatorModel& model, const Dataset& data,
                        const PretrainSpec& spec) {
  if (spec.strategy == Strategy::none) {
    throw ConfigError("pretraining: strategy 'none' trains from scratch; "
                      "there is nothing to pretrain");
  }
  if (spec.batch_size < 1) throw ConfigError("pretraining: batch_size < 1");

  Dataset augmented;
  const Dataset* work = &data;
  if (spec.augmentation != AugmentationKind::none) {
    AugmentationSpec aug;
    aug.kind = spec.augmentation;
    RngStream rng(hash_str(spec.seed, "pretrain-augment"));
    augmented = expand_dataset(data, aug, rng);
    work = &augmented;
  }

  auto ctx = make_context(*work, spec);
  if (strategy_uses_head(spec.strategy)) attach_head(model, spec.strategy);

  torch::Tensor token;
  if (spec.strategy == Strategy::masked) {
    token = torch::zeros({ctx.mask_patch.t, ctx.mask_patch.x, ctx.mask_patch.y},
                         torch::requires_grad());
  }

  auto params = model.parameters();
  if (token.defined()) params.push_back(token);
  torch::optim::Adam opt(
      params, torch::optim::AdamOptions(spec.lr).weight_decay(
                  spec.weight_decay));

  PretrainResult result;
  result.resolved_epochs = resolve_pretrain_epochs(spec);
  const int n = static_cast<int>(work->items.size());
  const int64_t steps_per_epoch = (n + spec.batch_size - 1) / spec.batch_size;
  const int64_t total_steps = steps_per_epoch * result.resolved_epochs;

  model.train();
  const uint64_t shuffle_base = hash_str(spec.seed, "pretrain-shuffle");
  int64_t step = 0;
  for (int epoch = 0; epoch < result.resolved_epochs; ++epoch) {
    auto order = shuffled_indices(
        n, hash_combine(shuffle_base, static_cast<uint64_t>(epoch)));
    double loss_sum = 0.0;
    int64_t batches = 0;
    for (int begin = 0; begin < n; begin += spec.batch_size) {
      const int end = std::min(begin + spec.batch_size, n);
      std::vector<int> idx(order.begin() + begin, order.begin() + end);
      set_lr(opt, one_cycle_lr(spec.lr, step, total_steps));
      opt.zero_grad();
      try {
        auto loss =
            strategy_loss(model, *work, idx, spec, ctx,
                          token.defined() ? &token : nullptr,
                          &result.degenerate_psi_pairs);
        loss.backward();
        opt.step();
        loss_sum += loss.item<double>();
      } catch (const NonFiniteError& e) {
        throw NonFiniteError("pretraining epoch " + std::to_string(epoch) +
                             ", batch " + std::to_string(batches) + ": " +
                             e.what());
      }
      ++batches;
      ++step;
    }
    result.epoch_losses.push_back(loss_sum / static_cast<double>(batches));
  }
  return result;
}

double pretext_validation_loss(OperatorModel& model, const Dataset& data,
                               const PretrainSpec& spec) {
  if (spec.strategy == Strategy::none) {
    throw ConfigError("pretraining: strategy 'none' has no objective");
  }
  auto ctx = make_context(data, spec);
  if (strategy_uses_head(spec.strategy) && !model.head) {
    throw ConfigError("pretext validation: model has no projection head");
  }
  torch::NoGradGuard no_grad;
  model.eval();
  const int n = static_cast<int>(data.items.size());
  double weighted = 0.0;
  int64_t dummy = 0;
  for (int begin = 0; begin < n; begin += spec.batch_size) {
    const int end = std::min(begin + spec.batch_size, n);
    std::vector<int> idx;
    for (int i = begin; i < end; ++i) idx.push_back(i);
    auto loss =
        strategy_loss(model, data, idx, spec, ctx, nullptr, &dummy);
    weighted += loss.item<double>() * static_cast<double>(end - begin);
  }
  model.train();
  return weighted / static_cast<double>(n);
}

}  // namespace pdebench
