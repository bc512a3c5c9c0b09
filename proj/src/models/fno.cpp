#include "pdebench/models/fno.hpp"

namespace pdebench {

using torch::indexing::Slice;

SpectralConv2d::SpectralConv2d(int in_channels, int out_channels, int modes)
    : in_(in_channels), out_(out_channels), modes_(modes) {
  const double scale = 1.0 / (static_cast<double>(in_) * out_);
  weight_ = register_parameter(
      "weight", scale * torch::rand({in_, out_, modes_, modes_, 2}));
}

torch::Tensor SpectralConv2d::forward(const torch::Tensor& x) {
  const auto B = x.size(0);
  const auto H = x.size(2);
  const auto W = x.size(3);
  if (modes_ > H / 2 + 1 || modes_ > W / 2 + 1)
    throw ShapeError("spectral conv: grid too small for " +
                     std::to_string(modes_) + " modes");
  auto x_ft = torch::fft::rfft2(x);
  auto corner =
      x_ft.index({Slice(), Slice(), Slice(0, modes_), Slice(0, modes_)});
  auto w = torch::view_as_complex(weight_);
  auto out_corner = torch::einsum("bixy,ioxy->boxy", {corner, w});
  auto out_ft = torch::zeros({B, out_, H, W / 2 + 1}, x_ft.options());
  out_ft.index_put_({Slice(), Slice(), Slice(0, modes_), Slice(0, modes_)},
                    out_corner);
  return torch::fft::irfft2(out_ft, std::vector<int64_t>{H, W});
}

FnoOperator::FnoOperator(const ModelConfig& cfg) : OperatorModel(cfg) {
  const int w = cfg.fno_width;
  lift_ = register_module(
      "lift", torch::nn::Conv2d(
                  torch::nn::Conv2dOptions(cfg.in_frames + 3, w, 1)));
  for (int i = 0; i < cfg.fno_layers; ++i) {
    spectral_.push_back(register_module(
        "spectral" + std::to_string(i),
        std::make_shared<SpectralConv2d>(w, w, cfg.fno_modes)));
    pointwise_.push_back(register_module(
        "pointwise" + std::to_string(i),
        torch::nn::Conv2d(torch::nn::Conv2dOptions(w, w, 1))));
  }
  proj1_ = register_module(
      "proj1", torch::nn::Conv2d(torch::nn::Conv2dOptions(w, 128, 1)));
  proj2_ = register_module(
      "proj2",
      torch::nn::Conv2d(torch::nn::Conv2dOptions(128, cfg.out_frames, 1)));
  torch::NoGradGuard ng;
  proj2_->bias.zero_();
}

torch::Tensor FnoOperator::backbone(const torch::Tensor& frames,
                                    const torch::Tensor& coords) {
  auto x = lift_(torch::cat({frames, coords}, 1));
  for (size_t i = 0; i < spectral_.size(); ++i)
    x = torch::gelu(spectral_[i]->forward(x) + pointwise_[i](x));
  return proj2_(torch::gelu(proj1_(x)));
}

torch::Tensor FnoOperator::spectral_only(int layer, const torch::Tensor& x) {
  if (layer < 0 || layer >= static_cast<int>(spectral_.size()))
    throw ConfigError("spectral layer index out of range");
  return spectral_[layer]->forward(x);
}

}  // namespace pdebench
