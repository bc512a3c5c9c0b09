#include "pdebench/models/unet.hpp"

#include <cmath>

namespace pdebench {

using torch::indexing::Slice;

namespace {
torch::nn::Conv2d conv3(int in, int out, int stride = 1) {
  return torch::nn::Conv2d(
      torch::nn::Conv2dOptions(in, out, 3).stride(stride).padding(1));
}
}  // namespace

ResBlock::ResBlock(int in_channels, int out_channels) {
  n1_ = register_module("n1", torch::nn::GroupNorm(8, in_channels));
  c1_ = register_module("c1", conv3(in_channels, out_channels));
  n2_ = register_module("n2", torch::nn::GroupNorm(8, out_channels));
  c2_ = register_module("c2", conv3(out_channels, out_channels));
  if (in_channels != out_channels)
    skip_ = register_module(
        "skip", torch::nn::Conv2d(
                    torch::nn::Conv2dOptions(in_channels, out_channels, 1)));
}

torch::Tensor ResBlock::forward(const torch::Tensor& x) {
  auto h = c1_(torch::gelu(n1_(x)));
  h = c2_(torch::gelu(n2_(h)));
  return h + (skip_ ? skip_(x) : x);
}

SpatialAttention::SpatialAttention(int channels, int heads, int head_dim)
    : heads_(heads), head_dim_(head_dim) {
  const int inner = heads * head_dim;
  norm_ = register_module("norm", torch::nn::GroupNorm(8, channels));
  qkv_ = register_module(
      "qkv", torch::nn::Conv2d(
                 torch::nn::Conv2dOptions(channels, 3 * inner, 1)));
  proj_ = register_module(
      "proj",
      torch::nn::Conv2d(torch::nn::Conv2dOptions(inner, channels, 1)));
}

torch::Tensor SpatialAttention::forward(const torch::Tensor& x) {
  const auto B = x.size(0);
  const auto H = x.size(2);
  const auto W = x.size(3);
  const auto N = H * W;
  auto qkv = qkv_(norm_(x)).view({B, 3, heads_, head_dim_, N});
  auto q = qkv.select(1, 0).transpose(-2, -1);  // [B, h, N, hd]
  auto k = qkv.select(1, 1);                    // [B, h, hd, N]
  auto v = qkv.select(1, 2).transpose(-2, -1);
  auto attn = torch::softmax(
      torch::matmul(q, k) / std::sqrt(static_cast<double>(head_dim_)), -1);
  auto y = torch::matmul(attn, v).transpose(-2, -1);  // [B, h, hd, N]
  y = y.reshape({B, heads_ * head_dim_, H, W});
  return x + proj_(y);
}

UNetOperator::UNetOperator(const ModelConfig& cfg) : OperatorModel(cfg) {
  const int c1 = cfg.unet_hidden;  // widths c1, 2*c1, 4*c1
  const int c2 = 2 * c1, c3 = 4 * c1;

  stem_ = register_module("stem", conv3(cfg.in_frames + 2, c1));

  auto rb = [&](const std::string& name, int in, int out) {
    auto block = std::make_shared<ResBlock>(in, out);
    register_module(name, block);
    return block;
  };

  down_ = {rb("d0a", c1, c1), rb("d0b", c1, c1),
           rb("d1a", c1, c2), rb("d1b", c2, c2),
           rb("d2a", c2, c3), rb("d2b", c3, c3)};
  downsample_.push_back(register_module("down0", conv3(c1, c1, 2)));
  downsample_.push_back(register_module("down1", conv3(c2, c2, 2)));

  mid1_ = rb("mid1", c3, c3);
  mid_attn_ = register_module(
      "mid_attn", std::make_shared<SpatialAttention>(c3, 2, c3));
  mid2_ = rb("mid2", c3, c3);

  up_ = {rb("u2a", c3 + c3, c3), rb("u2b", c3 + c3, c3),
         rb("u2c", c3 + c2, c3), rb("u1a", c3 + c2, c2),
         rb("u1b", c2 + c2, c2), rb("u1c", c2 + c1, c2),
         rb("u0a", c2 + c1, c1), rb("u0b", c1 + c1, c1),
         rb("u0c", c1 + c1, c1)};
  upsample_.push_back(register_module(
      "up2", torch::nn::ConvTranspose2d(
                 torch::nn::ConvTranspose2dOptions(c3, c3, 4)
                     .stride(2)
                     .padding(1))));
  upsample_.push_back(register_module(
      "up1", torch::nn::ConvTranspose2d(
                 torch::nn::ConvTranspose2dOptions(c2, c2, 4)
                     .stride(2)
                     .padding(1))));

  out_norm_ = register_module("out_norm", torch::nn::GroupNorm(8, c1));
  out_conv_ = register_module("out_conv", conv3(c1, cfg.out_frames));
  torch::NoGradGuard ng;
  out_conv_->bias.zero_();
}

torch::Tensor UNetOperator::backbone(const torch::Tensor& frames,
                                     const torch::Tensor& coords) {
  if (frames.size(2) % 4 != 0 || frames.size(3) % 4 != 0)
    throw ShapeError("unet: spatial extents must be divisible by 4");

  auto x = stem_(torch::cat({frames, coords.index({Slice(), Slice(0, 2)})}, 1));
  std::vector<torch::Tensor> skips{x};

  x = down_[0]->forward(x);
  skips.push_back(x);
  x = down_[1]->forward(x);
  skips.push_back(x);
  x = downsample_[0](x);
  skips.push_back(x);
  x = down_[2]->forward(x);
  skips.push_back(x);
  x = down_[3]->forward(x);
  skips.push_back(x);
  x = downsample_[1](x);
  skips.push_back(x);
  x = down_[4]->forward(x);
  skips.push_back(x);
  x = down_[5]->forward(x);
  skips.push_back(x);

  x = mid2_->forward(mid_attn_->forward(mid1_->forward(x)));

  auto pop = [&]() {
    auto s = skips.back();
    skips.pop_back();
    return s;
  };
  for (int i = 0; i < 9; ++i) {
    x = up_[i]->forward(torch::cat({x, pop()}, 1));
    if (i == 2) x = upsample_[0](x);
    if (i == 5) x = upsample_[1](x);
  }
  return out_conv_(torch::gelu(out_norm_(x)));
}

}  // namespace pdebench
