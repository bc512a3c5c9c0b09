#include "pdebench/models/oformer.hpp"

namespace pdebench {

using torch::indexing::Slice;

GalerkinAttention::GalerkinAttention(int dim, int heads, int head_dim)
    : heads_(heads), head_dim_(head_dim) {
  const int inner = heads * head_dim;
  q_ = register_module("q", torch::nn::Linear(dim, inner));
  k_ = register_module("k", torch::nn::Linear(dim, inner));
  v_ = register_module("v", torch::nn::Linear(dim, inner));
  out_ = register_module("out", torch::nn::Linear(inner, dim));
  k_norm_ = register_module(
      "k_norm", torch::nn::LayerNorm(torch::nn::LayerNormOptions(
                    {static_cast<int64_t>(head_dim)})));
  v_norm_ = register_module(
      "v_norm", torch::nn::LayerNorm(torch::nn::LayerNormOptions(
                    {static_cast<int64_t>(head_dim)})));
}

torch::Tensor GalerkinAttention::forward(const torch::Tensor& q_in,
                                         const torch::Tensor& kv_in) {
  const auto B = q_in.size(0);
  const auto Nq = q_in.size(1);
  const auto Nk = kv_in.size(1);
  auto split = [&](const torch::Tensor& t, int64_t n) {
    return t.view({B, n, heads_, head_dim_}).transpose(1, 2);
  };
  auto q = split(q_(q_in), Nq);
  auto k = k_norm_(split(k_(kv_in), Nk));
  auto v = v_norm_(split(v_(kv_in), Nk));
  auto context = torch::matmul(k.transpose(-2, -1), v) /
                 static_cast<double>(Nk);            // [B, h, hd, hd]
  auto y = torch::matmul(q, context);                // [B, h, Nq, hd]
  y = y.transpose(1, 2).reshape({B, Nq, heads_ * head_dim_});
  return out_(y);
}

OFormerBlock::OFormerBlock(int dim, int heads, int head_dim, int ffn_width,
                           bool cross)
    : cross_(cross) {
  attn_ = register_module(
      "attn", std::make_shared<GalerkinAttention>(dim, heads, head_dim));
  norm_q_ = register_module("norm_q",
                            torch::nn::LayerNorm(torch::nn::LayerNormOptions(
                                {static_cast<int64_t>(dim)})));
  if (cross_)
    norm_kv_ = register_module("norm_kv",
                               torch::nn::LayerNorm(torch::nn::LayerNormOptions(
                                   {static_cast<int64_t>(dim)})));
  norm_ffn_ = register_module("norm_ffn",
                              torch::nn::LayerNorm(torch::nn::LayerNormOptions(
                                  {static_cast<int64_t>(dim)})));
  ffn1_ = register_module("ffn1", torch::nn::Linear(dim, ffn_width));
  ffn2_ = register_module("ffn2", torch::nn::Linear(ffn_width, dim));
}

torch::Tensor OFormerBlock::forward(const torch::Tensor& x,
                                    const torch::Tensor& kv) {
  torch::Tensor h;
  if (cross_)
    h = x + attn_->forward(norm_q_(x), norm_kv_(kv));
  else {
    auto n = norm_q_(x);
    h = x + attn_->forward(n, n);
  }
  return h + ffn2_(torch::gelu(ffn1_(norm_ffn_(h))));
}

OFormerOperator::OFormerOperator(const ModelConfig& cfg) : OperatorModel(cfg) {
  const int d = cfg.oformer_hidden;
  const int head_dim = d;  // latent width doubles as per-head width
  input_ = register_module("input", torch::nn::Linear(cfg.in_frames + 2, d));
  query_ = register_module("query", torch::nn::Linear(2, d));
  for (int i = 0; i < cfg.oformer_encoder_depth; ++i)
    encoder_.push_back(register_module(
        "encoder" + std::to_string(i),
        std::make_shared<OFormerBlock>(d, cfg.oformer_heads, head_dim,
                                       cfg.oformer_ffn, false)));
  for (int i = 0; i < cfg.oformer_decoder_depth; ++i)
    decoder_.push_back(register_module(
        "decoder" + std::to_string(i),
        std::make_shared<OFormerBlock>(d, cfg.oformer_heads, head_dim,
                                       cfg.oformer_ffn, true)));
  prop1_ = register_module("prop1",
                           torch::nn::Linear(d, cfg.oformer_propagator));
  prop2_ = register_module("prop2",
                           torch::nn::Linear(cfg.oformer_propagator, d));
  frame_ = register_module("frame", torch::nn::Linear(d, 1));
  torch::NoGradGuard ng;
  frame_->bias.zero_();
}

torch::Tensor OFormerOperator::backbone(const torch::Tensor& frames,
                                        const torch::Tensor& coords) {
  const auto B = frames.size(0);
  const auto H = frames.size(2);
  const auto W = frames.size(3);

  auto xy = coords.index({Slice(), Slice(0, 2)});
  auto tokens =
      torch::cat({frames, xy}, 1).flatten(2).transpose(1, 2);  // [B, N, C+2]
  auto h = input_(tokens);
  for (auto& blk : encoder_) h = blk->forward(h);

  auto queries = query_(xy.flatten(2).transpose(1, 2));  // [B, N, d]
  auto z = queries;
  for (auto& blk : decoder_) z = blk->forward(z, h);

  std::vector<torch::Tensor> steps;
  steps.reserve(cfg_.out_frames);
  for (int s = 0; s < cfg_.out_frames; ++s) {
    steps.push_back(frame_(z));  // [B, N, 1]
    if (s + 1 < cfg_.out_frames)
      z = z + prop2_(torch::gelu(prop1_(z)));
  }
  auto out = torch::cat(steps, 2);  // [B, N, out_frames]
  return out.transpose(1, 2).view({B, cfg_.out_frames, H, W});
}

}  // namespace pdebench
