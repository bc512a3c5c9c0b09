#pragma once

#include "pdebench/models/model.hpp"

namespace pdebench {

class ResBlock : public torch::nn::Module {
 public:
  ResBlock(int in_channels, int out_channels);

  torch::Tensor forward(const torch::Tensor& x);

 private:
  torch::nn::GroupNorm n1_{nullptr}, n2_{nullptr};
  torch::nn::Conv2d c1_{nullptr}, c2_{nullptr}, skip_{nullptr};
};

// Multi-head self-attention over spatial positions, used at the bottleneck.
class SpatialAttention : public torch::nn::Module {
 public:
  SpatialAttention(int channels, int heads, int head_dim);

  torch::Tensor forward(const torch::Tensor& x);

 private:
  int heads_, head_dim_;
  torch::nn::GroupNorm norm_{nullptr};
  torch::nn::Conv2d qkv_{nullptr}, proj_{nullptr};
};

// U-shaped residual network with channel widths hidden * (1, 2, 4), two
// residual blocks per encoder stage plus two at the bottleneck (flanking the
// attention), skip connections after every encoder block and downsample,
// and three residual blocks per decoder stage.
class UNetOperator : public OperatorModel {
 public:
  explicit UNetOperator(const ModelConfig& cfg);

  torch::Tensor backbone(const torch::Tensor& frames,
                         const torch::Tensor& coords) override;

 private:
  torch::nn::Conv2d stem_{nullptr};
  std::vector<std::shared_ptr<ResBlock>> down_;
  std::vector<torch::nn::Conv2d> downsample_;
  std::shared_ptr<ResBlock> mid1_, mid2_;
  std::shared_ptr<SpatialAttention> mid_attn_;
  std::vector<std::shared_ptr<ResBlock>> up_;
  std::vector<torch::nn::ConvTranspose2d> upsample_;
  torch::nn::GroupNorm out_norm_{nullptr};
  torch::nn::Conv2d out_conv_{nullptr};
};

}  // namespace pdebench
