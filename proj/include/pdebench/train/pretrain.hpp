#pragma once

#include <cstdint>
#include <vector>

#include "pdebench/augment/augment.hpp"
#include "pdebench/datagen/dataset.hpp"
#include "pdebench/models/model.hpp"
#include "pdebench/pretext/strategy.hpp"

namespace pdebench {

struct PretrainSpec {
  Strategy strategy = Strategy::binary;
  AugmentationKind augmentation = AugmentationKind::none;
  DownstreamTask task = DownstreamTask::autoregressive;  // transfer only
  int epochs = 0;  // 0 resolves to the strategy default (binary 100, else 200)
  int batch_size = 32;
  double lr = 1e-3;
  double weight_decay = 1e-6;
  double picl_tau = 1.0;
  double mask_ratio = 0.75;
  int jigsaw_bank_size = 1000;
  int fixed_future_frame = 31;  // transfer + fixed_future target
  uint64_t seed = 0;
};

struct PretrainResult {
  std::vector<double> epoch_losses;  // mean training loss per epoch
  int resolved_epochs = 0;
  int64_t degenerate_psi_pairs = 0;
  int near_zero_scale_draws = 0;
};

int resolve_pretrain_epochs(const PretrainSpec& spec);

// Train `model` on the pretext objective over `data` (attaching the
// strategy's projection head when it uses one; the head stays attached so
// the caller can checkpoint and evaluate it). Labels and task parameters for
// a given dataset position are fixed across epochs; only the batch order
// reshuffles. Rejects Strategy::none.
PretrainResult pretrain(OperatorModel& model, const Dataset& data,
                        const PretrainSpec& spec);

// Mean pretext objective over `data` without gradient tracking, batched with
// the same fixed per-position label streams as training. The masked
// strategy's learned token is not part of the model, so evaluation composes
// inputs with the zero token; the value is a pure function of (model
// weights, data, spec).
double pretext_validation_loss(OperatorModel& model, const Dataset& data,
                               const PretrainSpec& spec);

}  // namespace pdebench
