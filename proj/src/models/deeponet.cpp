#include "pdebench/models/deeponet.hpp"

namespace pdebench {

using torch::indexing::Slice;

DeepOnetOperator::DeepOnetOperator(const ModelConfig& cfg)
    : OperatorModel(cfg) {
  const int w = cfg.deeponet_width;
  if (w % cfg.out_frames != 0)
    throw ConfigError("deeponet: width " + std::to_string(w) +
                      " not divisible by out_frames " +
                      std::to_string(cfg.out_frames));
  int in = cfg.in_frames;
  for (int i = 0; i < cfg.deeponet_depth; ++i) {
    branch_.push_back(register_module("branch" + std::to_string(i),
                                      torch::nn::Linear(in, w)));
    in = w;
  }
  in = 2;
  for (int i = 0; i < cfg.deeponet_depth; ++i) {
    trunk_.push_back(register_module("trunk" + std::to_string(i),
                                     torch::nn::Linear(in, w)));
    in = w;
  }
  out_bias_ = register_parameter("out_bias", torch::zeros({cfg.out_frames}));
}

torch::Tensor DeepOnetOperator::backbone(const torch::Tensor& frames,
                                         const torch::Tensor& coords) {
  const auto B = frames.size(0);
  const auto H = frames.size(2);
  const auto W = frames.size(3);
  const int of = cfg_.out_frames;
  const int gd = cfg_.deeponet_width / of;

  auto b = frames.permute({0, 2, 3, 1});
  for (size_t i = 0; i < branch_.size(); ++i) {
    b = branch_[i](b);
    if (i + 1 < branch_.size()) b = torch::silu(b);
  }
  b = b.mean({1, 2});  // [B, width]

  auto t = coords.index({Slice(), Slice(0, 2)}).permute({0, 2, 3, 1});
  for (auto& layer : trunk_) t = torch::silu(layer(t));

  auto bg = b.view({B, of, gd});
  auto tg = t.view({B, H, W, of, gd});
  auto out = torch::einsum("bfg,bxyfg->bfxy", {bg, tg});
  return out + out_bias_.view({1, of, 1, 1});
}

}  // namespace pdebench
