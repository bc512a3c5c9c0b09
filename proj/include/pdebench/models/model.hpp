#pragma once

#include <torch/torch.h>

#include <cstdint>
#include <memory>
#include <string>

#include "pdebench/core/errors.hpp"
#include "pdebench/datagen/grid.hpp"
#include "pdebench/pretext/strategy.hpp"

namespace pdebench {

enum class ModelFamily { fno, deeponet, oformer, unet };

std::string to_string(ModelFamily f);
ModelFamily model_family_from_string(const std::string& s);

// Architecture hyperparameters. Defaults are the benchmark settings; the
// per-family fields below the line are only read by their own family.
struct ModelConfig {
  ModelFamily family = ModelFamily::fno;
  int in_frames = 8;
  int out_frames = 8;  // 8 for autoregressive bundles, 1 for fixed-future

  int fno_modes = 4;
  int fno_width = 48;
  int fno_layers = 4;

  int deeponet_width = 256;
  int deeponet_depth = 3;

  int oformer_hidden = 32;
  int oformer_heads = 2;
  int oformer_encoder_depth = 2;
  int oformer_decoder_depth = 1;
  int oformer_ffn = 144;
  int oformer_propagator = 160;

  int unet_hidden = 16;
  int unet_blocks = 8;

  void validate() const;  // ConfigError on out-of-range values
};

enum class HeadKind { classifier, regressor, upsampler };

struct HeadSpec {
  HeadKind kind = HeadKind::classifier;
  int in_channels = 0;
  int out_dim = 0;  // logits, regressed values, or output channels
};

// Pretraining-only projection on top of backbone outputs: two stride-2
// convolutions, then either pool + flatten + linear (classifier/regressor)
// or two stride-2 transposed convolutions back to input resolution plus a
// 1x1 convolution to the label channels (upsampler).
class ProjectionHead : public torch::nn::Module {
 public:
  explicit ProjectionHead(const HeadSpec& spec);

  torch::Tensor forward(const torch::Tensor& features);
  const HeadSpec& spec() const { return spec_; }

 private:
  HeadSpec spec_;
  torch::nn::Conv2d down1_{nullptr}, down2_{nullptr};
  torch::nn::Linear fc_{nullptr};
  torch::nn::ConvTranspose2d up1_{nullptr}, up2_{nullptr};
  torch::nn::Conv2d out_conv_{nullptr};
};

// Trainable operator mapping [batch, in_frames, n_x, n_y] plus coordinate
// channels [batch, 3, n_x, n_y] (x, y, lead time) to
// [batch, out_frames, n_x, n_y].
class OperatorModel : public torch::nn::Module {
 public:
  explicit OperatorModel(const ModelConfig& cfg) : cfg_(cfg) {}

  // The operator itself, without the projection head.
  virtual torch::Tensor backbone(const torch::Tensor& frames,
                                 const torch::Tensor& coords) = 0;

  // backbone, then the attached head if any. Validates input shapes
  // (ShapeError) and rejects non-finite outputs naming the first offending
  // batch element (NonFiniteError).
  torch::Tensor forward(const torch::Tensor& frames,
                        const torch::Tensor& coords);

  const ModelConfig& config() const { return cfg_; }

  // Registers `h` as the attached head (replacing any current one);
  // nullptr detaches.
  void set_head(std::shared_ptr<ProjectionHead> h);

  std::shared_ptr<ProjectionHead> head;

 protected:
  ModelConfig cfg_;
};

// Seeded construction: the same (config, seed) yields bit-identical initial
// weights. Final output-layer biases start at zero.
std::shared_ptr<OperatorModel> build_model(const ModelConfig& cfg,
                                           uint64_t seed);

// Head wiring for a pretext strategy. Strategies that operate on raw
// backbone outputs (none, transfer, picl) reject attachment (ConfigError).
HeadSpec head_spec_for(Strategy strategy, const ModelConfig& cfg);
void attach_head(OperatorModel& model, Strategy strategy);
void detach_head(OperatorModel& model);

int64_t parameter_count(const torch::nn::Module& m);

// Throws NonFiniteError naming the first batch element containing a
// non-finite entry; `what` describes the tensor being checked.
void require_finite(const torch::Tensor& t, const char* what);

// Coordinate channels [batch, 3, n_x, n_y]: x and y grid-point coordinates
// in solver-domain units and a constant lead-time plane (prediction window
// start frame / (n_t - 1)).
torch::Tensor make_coords(const GridSpec& g, int batch, double lead,
                          torch::TensorOptions opts = {});

}  // namespace pdebench
