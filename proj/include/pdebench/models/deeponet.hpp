#pragma once

#include "pdebench/models/model.hpp"

namespace pdebench {

// DeepONet with temporal bundling on both nets. The branch is a pointwise
// MLP over each grid point's input time series, mean-pooled over space; the
// trunk embeds (x, y). Both latents are split into out_frames groups; frame
// f is the groupwise dot product plus a per-frame bias.
class DeepOnetOperator : public OperatorModel {
 public:
  explicit DeepOnetOperator(const ModelConfig& cfg);

  torch::Tensor backbone(const torch::Tensor& frames,
                         const torch::Tensor& coords) override;

 private:
  std::vector<torch::nn::Linear> branch_, trunk_;
  torch::Tensor out_bias_;
};

}  // namespace pdebench
