#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "pdebench/datagen/dataset.hpp"
#include "pdebench/models/model.hpp"
#include "pdebench/pretext/strategy.hpp"

namespace pdebench {

struct FinetuneSpec {
  DownstreamTask task = DownstreamTask::autoregressive;
  int n_samples = 500;  // drawn from the fine-tuning pool without replacement
  int epochs = 200;
  int batch_size = 32;
  double lr = 1e-3;
  double weight_decay = 1e-6;
  bool pushforward = true;  // autoregressive objective only
  int fixed_future_frame = 31;
  uint64_t seed = 0;
};

struct FinetuneOutcome {
  std::vector<double> epoch_losses;
  double error = std::numeric_limits<double>::infinity();
  bool diverged = false;
};

// Train the downstream objective on a seeded n-sample subset of `pool`
// (cosine-annealed lr per epoch). Autoregressive training draws each batch
// element's window start per epoch; with the pushforward trick the first
// 8-frame prediction is made without gradients and fed back as the input of
// the supervised second step. Throws NonFiniteError if the model blows up.
std::vector<double> finetune(OperatorModel& model, const Dataset& pool,
                             const FinetuneSpec& spec);

// Mean relative L2 of the frames [0, 8) -> frame `future_frame` prediction.
double evaluate_fixed_future(OperatorModel& model, const Dataset& val,
                             int future_frame, int batch_size = 32);

// Three-step rollout from frames [0, 8): each prediction feeds the next
// call, and a sample's error is the sum of its three per-window relative L2
// values; returns the mean over samples.
double evaluate_autoregressive(OperatorModel& model, const Dataset& val,
                               int batch_size = 32);

// finetune + evaluate with blowups converted to a diverged outcome
// (error = infinity) instead of an exception.
FinetuneOutcome finetune_and_evaluate(OperatorModel& model,
                                      const Dataset& pool, const Dataset& val,
                                      const FinetuneSpec& spec);

// One pushforward step: predict frames [t0+8, t0+16) from `window` (frames
// [t0, t0+8)) without tracking gradients, feed that prediction back, and
// return the relative L2 of the second prediction against `target` (frames
// [t0+16, t0+24)). `first_pass_out` receives the intermediate prediction;
// `injected_first` replaces it (bypassing the first model call) so the
// gradient path can be probed externally.
torch::Tensor pushforward_step_loss(OperatorModel& model,
                                    const torch::Tensor& window,
                                    const torch::Tensor& target,
                                    const GridSpec& g, int t0,
                                    torch::Tensor* first_pass_out = nullptr,
                                    const torch::Tensor* injected_first = nullptr);

}  // namespace pdebench
