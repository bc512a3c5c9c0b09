#include "pdebench/models/model.hpp"

#include "pdebench/models/deeponet.hpp"
#include "pdebench/models/fno.hpp"
#include "pdebench/models/oformer.hpp"
#include "pdebench/models/unet.hpp"

namespace pdebench {

using torch::indexing::Slice;

std::string to_string(ModelFamily f) {
  switch (f) {
    case ModelFamily::fno: return "fno";
    case ModelFamily::deeponet: return "deeponet";
    case ModelFamily::oformer: return "oformer";
    case ModelFamily::unet: return "unet";
  }
  throw ConfigError("unknown model family enum value");
}

ModelFamily model_family_from_string(const std::string& s) {
  if (s == "fno") return ModelFamily::fno;
  if (s == "deeponet") return ModelFamily::deeponet;
  if (s == "oformer") return ModelFamily::oformer;
  if (s == "unet") return ModelFamily::unet;
  throw ConfigError("unknown model family '" + s +
                    "' (valid: fno, deeponet, oformer, unet)");
}

void ModelConfig::validate() const {
  if (in_frames < 1 || out_frames < 1)
    throw ConfigError("model: frame counts must be positive");
  switch (family) {
    case ModelFamily::fno:
      if (fno_modes < 1 || fno_width < 1 || fno_layers < 1)
        throw ConfigError("fno: modes, width, and layers must be positive");
      break;
    case ModelFamily::deeponet:
      if (deeponet_width < 1 || deeponet_depth < 1)
        throw ConfigError("deeponet: width and depth must be positive");
      if (deeponet_width % out_frames != 0)
        throw ConfigError("deeponet: width must be divisible by out_frames");
      break;
    case ModelFamily::oformer:
      if (oformer_hidden < 1 || oformer_heads < 1 ||
          oformer_encoder_depth < 1 || oformer_decoder_depth < 1 ||
          oformer_ffn < 1 || oformer_propagator < 1)
        throw ConfigError("oformer: all dimensions must be positive");
      break;
    case ModelFamily::unet:
      if (unet_hidden < 8 || unet_hidden % 8 != 0)
        throw ConfigError("unet: hidden width must be a positive multiple of 8");
      if (unet_blocks != 8)
        throw ConfigError(
            "unet: the 3-stage layout requires exactly 8 blocks (6 encoder + "
            "2 bottleneck)");
      break;
  }
}

ProjectionHead::ProjectionHead(const HeadSpec& spec) : spec_(spec) {
  if (spec_.in_channels < 1 || spec_.out_dim < 1)
    throw ConfigError("projection head: channels and output size must be "
                      "positive");
  const int w = 16;
  down1_ = register_module(
      "down1", torch::nn::Conv2d(torch::nn::Conv2dOptions(spec_.in_channels,
                                                          w, 3)
                                     .stride(2)
                                     .padding(1)));
  down2_ = register_module(
      "down2",
      torch::nn::Conv2d(torch::nn::Conv2dOptions(w, w, 3).stride(2).padding(
          1)));
  if (spec_.kind == HeadKind::upsampler) {
    up1_ = register_module(
        "up1", torch::nn::ConvTranspose2d(
                   torch::nn::ConvTranspose2dOptions(w, w, 4).stride(2).padding(
                       1)));
    up2_ = register_module(
        "up2", torch::nn::ConvTranspose2d(
                   torch::nn::ConvTranspose2dOptions(w, w, 4).stride(2).padding(
                       1)));
    out_conv_ = register_module(
        "out_conv",
        torch::nn::Conv2d(torch::nn::Conv2dOptions(w, spec_.out_dim, 1)));
  } else {
    fc_ = register_module("fc", torch::nn::Linear(w * 4 * 4, spec_.out_dim));
  }
}

torch::Tensor ProjectionHead::forward(const torch::Tensor& features) {
  if (features.dim() != 4 || features.size(1) != spec_.in_channels)
    throw ShapeError("projection head: expected [batch, " +
                     std::to_string(spec_.in_channels) +
                     ", h, w] features");
  auto x = torch::gelu(down1_(features));
  x = torch::gelu(down2_(x));
  if (spec_.kind == HeadKind::upsampler) {
    x = torch::gelu(up1_(x));
    x = torch::gelu(up2_(x));
    return out_conv_(x);
  }
  x = torch::adaptive_avg_pool2d(x, {4, 4});
  return fc_(x.flatten(1));
}

void require_finite(const torch::Tensor& t, const char* what) {
  auto finite = torch::isfinite(t);
  if (finite.all().item<bool>()) return;
  auto per_sample = finite.reshape({t.size(0), -1}).all(1);
  int64_t bad = 0;
  for (; bad < t.size(0); ++bad)
    if (!per_sample[bad].item<bool>()) break;
  throw NonFiniteError(std::string(what) + ": non-finite values in batch "
                       "element " + std::to_string(bad));
}

torch::Tensor OperatorModel::forward(const torch::Tensor& frames,
                                     const torch::Tensor& coords) {
  if (frames.dim() != 4 || coords.dim() != 4)
    throw ShapeError("model: frames and coords must be rank-4");
  if (frames.size(1) != cfg_.in_frames)
    throw ShapeError("model: expected " + std::to_string(cfg_.in_frames) +
                     " input frames, got " + std::to_string(frames.size(1)));
  if (coords.size(1) != 3 || coords.size(2) != frames.size(2) ||
      coords.size(3) != frames.size(3) || coords.size(0) != frames.size(0))
    throw ShapeError("model: coords must be [batch, 3, n_x, n_y] matching "
                     "frames");
  auto out = backbone(frames, coords);
  require_finite(out, "model output");
  if (head) {
    if (out.size(1) != head->spec().in_channels)
      throw ShapeError("head expects " +
                       std::to_string(head->spec().in_channels) +
                       " channels, backbone emits " +
                       std::to_string(out.size(1)));
    out = head->forward(out);
    require_finite(out, "head output");
  }
  return out;
}

std::shared_ptr<OperatorModel> build_model(const ModelConfig& cfg,
                                           uint64_t seed) {
  cfg.validate();
  torch::manual_seed(seed);
  switch (cfg.family) {
    case ModelFamily::fno: return std::make_shared<FnoOperator>(cfg);
    case ModelFamily::deeponet: return std::make_shared<DeepOnetOperator>(cfg);
    case ModelFamily::oformer: return std::make_shared<OFormerOperator>(cfg);
    case ModelFamily::unet: return std::make_shared<UNetOperator>(cfg);
  }
  throw ConfigError("unknown model family enum value");
}

HeadSpec head_spec_for(Strategy strategy, const ModelConfig& cfg) {
  // Whole-trajectory strategies see the backbone run over each of the
  // trajectory's disjoint input windows with outputs concatenated, so their
  // heads consume (n_t / in_frames) * out_frames channels.
  const int whole = (32 / cfg.in_frames) * cfg.out_frames;
  switch (strategy) {
    case Strategy::binary:
      return {HeadKind::classifier, whole, 1};
    case Strategy::timesort:
    case Strategy::spacesort:
      return {HeadKind::classifier, whole, 24};
    case Strategy::jigsaw:
      return {HeadKind::classifier, whole, 1000};
    case Strategy::coefficient:
      return {HeadKind::regressor, whole, 3};
    case Strategy::derivative:
      return {HeadKind::upsampler, cfg.out_frames, 5};
    case Strategy::masked:
      return {HeadKind::upsampler, whole, whole};
    default:
      throw ConfigError("strategy '" + to_string(strategy) +
                        "' does not use a projection head");
  }
}

void OperatorModel::set_head(std::shared_ptr<ProjectionHead> h) {
  if (head) {
    unregister_module("head");
    head.reset();
  }
  if (h) {
    head = std::move(h);
    register_module("head", head);
  }
}

void attach_head(OperatorModel& model, Strategy strategy) {
  model.set_head(std::make_shared<ProjectionHead>(
      head_spec_for(strategy, model.config())));
}

void detach_head(OperatorModel& model) { model.set_head(nullptr); }

int64_t parameter_count(const torch::nn::Module& m) {
  int64_t n = 0;
  for (const auto& p : m.parameters()) n += p.numel();
  return n;
}

torch::Tensor make_coords(const GridSpec& g, int batch, double lead,
                          torch::TensorOptions opts) {
  if (!opts.has_dtype()) opts = opts.dtype(torch::kFloat32);
  auto x = torch::empty({g.n_x}, opts);
  for (int i = 0; i < g.n_x; ++i) x[i] = g.x(i);
  auto y = torch::empty({g.n_y}, opts);
  for (int j = 0; j < g.n_y; ++j) y[j] = g.y(j);
  auto xg = x.view({1, 1, g.n_x, 1}).expand({batch, 1, g.n_x, g.n_y});
  auto yg = y.view({1, 1, 1, g.n_y}).expand({batch, 1, g.n_x, g.n_y});
  auto lt = torch::full({batch, 1, g.n_x, g.n_y}, lead, opts);
  return torch::cat({xg, yg, lt}, 1).contiguous();
}

}  // namespace pdebench
