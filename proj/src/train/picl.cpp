#include "pdebench/train/picl.hpp"

#include <string>

#include "pdebench/core/errors.hpp"
#include "pdebench/pretext/tasks.hpp"
#include "pdebench/train/train.hpp"

namespace pdebench {

namespace {

torch::Tensor d1_central(const torch::Tensor& u, int64_t dim, double h) {
  return (torch::roll(u, {-1}, {dim}) - torch::roll(u, {1}, {dim})) / (2.0 * h);
}

torch::Tensor d1_backward(const torch::Tensor& u, int64_t dim, double h) {
  return (u - torch::roll(u, {1}, {dim})) / h;
}

torch::Tensor d1_forward(const torch::Tensor& u, int64_t dim, double h) {
  return (torch::roll(u, {-1}, {dim}) - u) / h;
}

torch::Tensor laplacian(const torch::Tensor& u, double dx, double dy) {
  auto lx = (torch::roll(u, {1}, {-2}) + torch::roll(u, {-1}, {-2}) - 2.0 * u) /
            (dx * dx);
  auto ly = (torch::roll(u, {1}, {-1}) + torch::roll(u, {-1}, {-1}) - 2.0 * u) /
            (dy * dy);
  return lx + ly;
}

torch::Tensor upwind_term(const torch::Tensor& u, const torch::Tensor& v,
                          int64_t dim, double h) {
  return v * torch::where(v >= 0, d1_backward(u, dim, h), d1_forward(u, dim, h));
}

}  // namespace

torch::Tensor euler_step(const torch::Tensor& u, PdeId pde,
                         const PdeCoefficients& coeffs, double dt,
                         const GridSpec& g) {
  if (u.dim() < 2) throw ShapeError("euler_step: need trailing (n_x, n_y) axes");
  switch (pde) {
    case PdeId::heat:
      return u + dt * coeffs.nu * laplacian(u, g.dx(), g.dy());
    case PdeId::advection:
      return u - dt * (coeffs.c_x * d1_central(u, -2, g.dx()) +
                       coeffs.c_y * d1_central(u, -1, g.dy()));
    case PdeId::burgers: {
      auto rhs = coeffs.nu * laplacian(u, g.dx(), g.dy()) -
                 upwind_term(u, coeffs.c_x * u, -2, g.dx()) -
                 upwind_term(u, coeffs.c_y * u, -1, g.dy());
      return u + dt * rhs;
    }
    case PdeId::navier_stokes:
      throw ConfigError("euler_step: the vorticity equation has no pointwise "
                        "explicit update");
  }
  throw ConfigError("euler_step: unknown equation");
}

torch::Tensor picl_loss(OperatorModel& model, const Dataset& ds,
                        const std::vector<int>& idx, double tau,
                        int64_t* degenerate_pairs) {
  const auto& cfg = model.config();
  if (cfg.out_frames != cfg.in_frames) {
    throw ConfigError("picl_loss: model must predict as many frames as it "
                      "consumes (out_frames " + std::to_string(cfg.out_frames) +
                      " vs in_frames " + std::to_string(cfg.in_frames) + ")");
  }
  if (idx.empty()) throw ShapeError("picl_loss: empty batch");
  const int f = cfg.in_frames;
  const auto b = static_cast<int64_t>(idx.size());

  auto input = window_tensor(ds, idx, 0, f);
  auto next = window_tensor(ds, idx, 1, f);
  auto coords = make_coords(ds.grid, static_cast<int>(b), 0.0);
  auto pred = model.forward(input, coords);

  const double dt = ds.grid.dt_save();
  std::vector<torch::Tensor> stepped(static_cast<size_t>(b));
  for (int64_t i = 0; i < b; ++i) {
    const auto& item = ds.items.at(static_cast<size_t>(idx[static_cast<size_t>(i)]));
    stepped[static_cast<size_t>(i)] =
        euler_step(pred[i], item.pde, item.coeffs, dt, ds.grid);
  }
  auto f_pred = torch::stack(stepped, 0);

  auto d_sys = next.unsqueeze(1) - input.unsqueeze(0);
  auto d_upd = f_pred.unsqueeze(1) - pred.unsqueeze(0);
  auto d_phys = (d_sys - d_upd).pow(2).mean({2, 3, 4});

  auto psi = torch::empty({b, b}, torch::kFloat32);
  auto pa = psi.accessor<float, 2>();
  for (int64_t i = 0; i < b; ++i) {
    const auto& ti = ds.items.at(static_cast<size_t>(idx[static_cast<size_t>(i)]));
    auto theta_i = theta_vector(ti.pde, ti.coeffs);
    for (int64_t j = 0; j < b; ++j) {
      const auto& tj = ds.items.at(static_cast<size_t>(idx[static_cast<size_t>(j)]));
      bool degenerate = false;
      pa[i][j] = static_cast<float>(
          picl_psi(theta_i, theta_vector(tj.pde, tj.coeffs), &degenerate));
      if (degenerate && degenerate_pairs) ++*degenerate_pairs;
    }
  }

  auto attract = 0.5 * psi * d_phys.pow(2);
  auto repel = 0.5 * (1.0 - psi) * torch::clamp_min(tau - d_phys, 0.0).pow(2);
  return (attract + repel).mean();
}

}  // namespace pdebench
