#pragma once

#include "pdebench/models/model.hpp"

namespace pdebench {

// Galerkin-style linear attention: keys and values are layer-normalized per
// head and contracted before the query product, so cost is linear in the
// token count.
class GalerkinAttention : public torch::nn::Module {
 public:
  GalerkinAttention(int dim, int heads, int head_dim);

  // queries [B, Nq, dim] attend over [B, Nk, dim].
  torch::Tensor forward(const torch::Tensor& q_in, const torch::Tensor& kv_in);

 private:
  int heads_, head_dim_;
  torch::nn::Linear q_{nullptr}, k_{nullptr}, v_{nullptr}, out_{nullptr};
  torch::nn::LayerNorm k_norm_{nullptr}, v_norm_{nullptr};
};

class OFormerBlock : public torch::nn::Module {
 public:
  OFormerBlock(int dim, int heads, int head_dim, int ffn_width,
               bool cross);

  // Self-attention when built with cross = false (kv defaults to x);
  // cross-attention from x to kv otherwise.
  torch::Tensor forward(const torch::Tensor& x, const torch::Tensor& kv = {});

 private:
  bool cross_;
  std::shared_ptr<GalerkinAttention> attn_;
  torch::nn::LayerNorm norm_q_{nullptr}, norm_kv_{nullptr}, norm_ffn_{nullptr};
  torch::nn::Linear ffn1_{nullptr}, ffn2_{nullptr};
};

// Operator transformer: grid points become tokens, a linear-attention
// encoder embeds the input window, a cross-attention decoder queries the
// latent at (x, y), and an MLP propagator advances the decoded latent one
// output frame per step with a shared pointwise frame head.
class OFormerOperator : public OperatorModel {
 public:
  explicit OFormerOperator(const ModelConfig& cfg);

  torch::Tensor backbone(const torch::Tensor& frames,
                         const torch::Tensor& coords) override;

 private:
  torch::nn::Linear input_{nullptr}, query_{nullptr};
  std::vector<std::shared_ptr<OFormerBlock>> encoder_, decoder_;
  torch::nn::Linear prop1_{nullptr}, prop2_{nullptr};
  torch::nn::Linear frame_{nullptr};
};

}  // namespace pdebench
