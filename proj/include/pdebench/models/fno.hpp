#pragma once

#include "pdebench/models/model.hpp"

namespace pdebench {

// 2D spectral convolution acting on the lowest `modes` x `modes` corner of
// the half-plane real FFT; all other modes are zeroed. Weights are complex,
// stored as a real [in, out, modes, modes, 2] parameter.
class SpectralConv2d : public torch::nn::Module {
 public:
  SpectralConv2d(int in_channels, int out_channels, int modes);

  torch::Tensor forward(const torch::Tensor& x);

 private:
  int in_, out_, modes_;
  torch::Tensor weight_;
};

// Fourier neural operator: pointwise lift of the input frames plus
// coordinate channels, `fno_layers` spectral + pointwise residual layers
// with GELU, and a two-layer pointwise projection.
class FnoOperator : public OperatorModel {
 public:
  explicit FnoOperator(const ModelConfig& cfg);

  torch::Tensor backbone(const torch::Tensor& frames,
                         const torch::Tensor& coords) override;

  // The spectral branch of one layer in isolation (no pointwise path, no
  // activation); used to verify the mode truncation.
  torch::Tensor spectral_only(int layer, const torch::Tensor& x);

 private:
  torch::nn::Conv2d lift_{nullptr};
  std::vector<std::shared_ptr<SpectralConv2d>> spectral_;
  std::vector<torch::nn::Conv2d> pointwise_;
  torch::nn::Conv2d proj1_{nullptr}, proj2_{nullptr};
};

}  // namespace pdebench
