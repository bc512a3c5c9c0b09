#include <cmath>
#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "pdebench/datagen/dataset.hpp"
#include "pdebench/datagen/initial_conditions.hpp"
#include "pdebench/datagen/solvers.hpp"

using namespace pdebench;

namespace {

double rel_l2(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

std::vector<double> frame(const Volume& u, int t) {
  return {u.plane(t), u.plane(t + 1)};
}

}  // namespace

TEST_CASE("grid spacing and frame times") {
  GridSpec g;
  CHECK(g.dx() == doctest::Approx(2.0 / 32));
  CHECK(g.dt_save() == doctest::Approx(2.0 / 31));
  CHECK(g.x(0) == -1.0);
  CHECK(g.x(16) == doctest::Approx(0.0));

  const GridSpec ns = GridSpec::standard(PdeId::navier_stokes, 64);
  CHECK(ns.x_min == 0.0);
  CHECK(ns.x_max == 1.0);
  CHECK(ns.t_end == 7.75);
  CHECK(ns.n_x == 64);
  CHECK(ns.n_t == 32);

  GridSpec bad;
  bad.n_x = 1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("sine initial conditions are periodic and shiftable") {
  GridSpec g;
  RngStream rng(7);
  const SineIcParams p = sample_sine_ic_params(rng);
  for (int j = 0; j < SineIcParams::modes; ++j) {
    CHECK(p.amplitude[j] >= -0.5);
    CHECK(p.amplitude[j] < 0.5);
    CHECK(p.lx[j] >= 1);
    CHECK(p.lx[j] <= 3);
    CHECK(p.phase[j] >= 0.0);
    CHECK(p.phase[j] < 2 * M_PI);
  }

  std::vector<double> base(g.n_x * g.n_y), moved(g.n_x * g.n_y);
  eval_sine_ic(p, g, base.data());
  SUBCASE("full-period shift is the identity") {
    eval_sine_ic(p, g, moved.data(), g.lx(), 0.0);
    for (size_t i = 0; i < base.size(); ++i)
      CHECK(std::abs(base[i] - moved[i]) < 1e-12);
  }
  SUBCASE("one-cell shift equals index rotation") {
    eval_sine_ic(p, g, moved.data(), g.dx(), 0.0);
    for (int i = 0; i < g.n_x; ++i)
      for (int j = 0; j < g.n_y; ++j)
        CHECK(moved[i * g.n_y + j] ==
              doctest::Approx(base[((i - 1 + g.n_x) % g.n_x) * g.n_y + j])
                  .epsilon(1e-10));
  }
}

TEST_CASE("grf initial condition has zero mean and seeded determinism") {
  const GridSpec g = GridSpec::standard(PdeId::navier_stokes, 32);
  RngStream a(11), b(11), c(12);
  const auto u1 = sample_grf_ic(g, a);
  const auto u2 = sample_grf_ic(g, b);
  const auto u3 = sample_grf_ic(g, c);
  CHECK(u1 == u2);
  CHECK(u1 != u3);
  double mean = 0.0;
  for (double v : u1) mean += v;
  CHECK(std::abs(mean / u1.size()) < 1e-12);
}

TEST_CASE("coefficient pools are disjoint and reject the missing one") {
  RngStream rng(3);
  for (int i = 0; i < 50; ++i) {
    const auto in = sample_coefficients(PdeId::heat, Distribution::in_dist, rng);
    const auto out =
        sample_coefficients(PdeId::heat, Distribution::out_dist, rng);
    CHECK(in.has_nu());
    CHECK(!in.has_c());
    CHECK(in.nu != out.nu);
  }
  for (int i = 0; i < 50; ++i) {
    const auto adv =
        sample_coefficients(PdeId::advection, Distribution::in_dist, rng);
    CHECK(!adv.has_nu());
    CHECK(adv.has_c());
    const auto b =
        sample_coefficients(PdeId::burgers, Distribution::in_dist, rng);
    CHECK(b.has_nu());
    CHECK(b.has_c());
  }
  CHECK_THROWS_AS(
      sample_coefficients(PdeId::navier_stokes, Distribution::out_dist, rng),
      ConfigError);
}

TEST_CASE("advection transports the initial condition exactly") {
  GridSpec g;
  RngStream rng(41);
  for (int rep = 0; rep < 5; ++rep) {
    const SineIcParams p = sample_sine_ic_params(rng);
    PdeCoefficients c;
    c.c_x = rng.uniform(0.1, 2.5);
    c.c_y = rng.uniform(0.1, 2.5);
    std::vector<double> ic(g.n_x * g.n_y);
    eval_sine_ic(p, g, ic.data());
    const Volume u = solve_advection(ic, g, c);
    CHECK(frame(u, 0) == ic);

    std::vector<double> expect(ic.size());
    for (int m = 1; m < g.n_t; ++m) {
      const double t = m * g.dt_save();
      eval_sine_ic(p, g, expect.data(), c.c_x * t, c.c_y * t);
      const auto got = frame(u, m);
      double worst = 0.0;
      for (size_t i = 0; i < expect.size(); ++i)
        worst = std::max(worst, std::abs(got[i] - expect[i]));
      CHECK(worst < 1e-10);
    }
  }
}

TEST_CASE("heat decays a single mode at second order in space") {
  PdeCoefficients c;
  c.nu = 1e-2;
  SolveOptions opt;
  opt.dt_internal = 1e-4;

  auto decay_error = [&](int res) {
    GridSpec g = GridSpec::standard(PdeId::heat, res);
    std::vector<double> ic(g.n_x * g.n_y);
    for (int i = 0; i < g.n_x; ++i)
      for (int j = 0; j < g.n_y; ++j)
        ic[i * g.n_y + j] = std::sin(M_PI * g.x(i)) * std::sin(M_PI * g.y(j));
    const Volume u = solve_heat(ic, g, c, opt);
    const double t = g.t_end;
    const double k2 = 2.0 * M_PI * M_PI;
    std::vector<double> expect(ic.size());
    for (size_t i = 0; i < ic.size(); ++i)
      expect[i] = ic[i] * std::exp(-c.nu * k2 * t);
    return rel_l2(frame(u, g.n_t - 1), expect);
  };

  const double e32 = decay_error(32);
  const double e64 = decay_error(64);
  CHECK(e32 < 1e-2);
  CHECK(e32 / e64 > 3.5);
  CHECK(e32 / e64 < 4.5);
}

TEST_CASE("heat rejects an unstable explicit step") {
  GridSpec g;
  PdeCoefficients c;
  c.nu = 2e-2;
  SolveOptions opt;
  opt.dt_internal = 1.0;  // far beyond nu dt (1/dx^2 + 1/dy^2) <= 1/4
  std::vector<double> ic(g.n_x * g.n_y, 0.0);
  ic[0] = 1.0;
  CHECK_THROWS_AS(solve_heat(ic, g, c, opt), StabilityViolation);
}

TEST_CASE("small-amplitude burgers matches heat") {
  GridSpec g;
  RngStream rng(97);
  for (int rep = 0; rep < 3; ++rep) {
    const SineIcParams p = sample_sine_ic_params(rng);
    std::vector<double> ic(g.n_x * g.n_y);
    eval_sine_ic(p, g, ic.data());
    for (double& v : ic) v *= 1e-3;

    PdeCoefficients c;
    c.nu = 1e-2;
    c.c_x = 1.0;
    c.c_y = 1.0;
    const Volume ub = solve_burgers(ic, g, c);
    PdeCoefficients ch;
    ch.nu = c.nu;
    const Volume uh = solve_heat(ic, g, ch);

    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < ub.size(); ++i) {
      num += (ub.v[i] - uh.v[i]) * (ub.v[i] - uh.v[i]);
      den += uh.v[i] * uh.v[i];
    }
    CHECK(std::sqrt(num / den) < 5e-2);
  }
}

TEST_CASE("navier-stokes vorticity stays finite with zero mean") {
  const GridSpec g = GridSpec::standard(PdeId::navier_stokes, 16);
  RngStream rng(5);
  const auto ic = sample_grf_ic(g, rng);
  PdeCoefficients c;
  c.nu = 1e-3;
  c.amplitude = 0.1;
  const Volume w = solve_navier_stokes(ic, g, c);
  CHECK(frame(w, 0) == ic);
  for (int m = 0; m < g.n_t; ++m) {
    double mean = 0.0, peak = 0.0;
    for (int i = 0; i < g.n_x; ++i)
      for (int j = 0; j < g.n_y; ++j) {
        const double v = w.at(m, i, j);
        REQUIRE(std::isfinite(v));
        mean += v;
        peak = std::max(peak, std::abs(v));
      }
    CHECK(std::abs(mean / (g.n_x * g.n_y)) < 1e-8);
    CHECK(peak < 100.0);
  }
}

TEST_CASE("residual diagnostics separate solutions from non-solutions") {
  GridSpec g;
  RngStream rng(13);
  const SineIcParams p = sample_sine_ic_params(rng);
  std::vector<double> ic(g.n_x * g.n_y);
  eval_sine_ic(p, g, ic.data());
  PdeCoefficients c;
  c.nu = 1e-2;
  const Volume u = solve_heat(ic, g, c);
  CHECK(heat_residual(u, g, c.nu) < 0.1);

  Volume bad = u;
  for (auto& v : bad.v) v = v * v;  // squaring breaks linearity
  CHECK(heat_residual(bad, g, c.nu) > 10 * heat_residual(u, g, c.nu));
}

TEST_CASE("out-distribution burgers reuses the in-distribution ic stream") {
  const uint64_t master = 99;
  CHECK(ic_stream_seed(master, Split::finetune, Distribution::out_dist,
                       PdeId::burgers, 17) ==
        ic_stream_seed(master, Split::finetune, Distribution::in_dist,
                       PdeId::burgers, 17));
  CHECK(ic_stream_seed(master, Split::finetune, Distribution::out_dist,
                       PdeId::heat, 17) !=
        ic_stream_seed(master, Split::finetune, Distribution::in_dist,
                       PdeId::heat, 17));
  CHECK(coeff_stream_seed(master, Split::finetune, Distribution::out_dist,
                          PdeId::burgers, 17) !=
        coeff_stream_seed(master, Split::finetune, Distribution::in_dist,
                          PdeId::burgers, 17));
}

TEST_CASE("dataset containers round-trip and advertise completeness") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "pdebench_dataset_test";
  fs::create_directories(dir);
  const std::string path = (dir / "tiny.h5").string();

  GenerateRequest req;
  req.split = Split::validation;
  req.dist = Distribution::in_dist;
  req.resolution = 16;
  req.count_per_pde = 2;
  req.master_seed = 42;

  const DatasetManifest m = write_dataset(req, path);
  CHECK(m.counts.size() == 3);
  CHECK(dataset_complete(path));
  CHECK(fs::exists(manifest_path_for(path)));

  const Dataset ds = load_dataset(path);
  CHECK(ds.items.size() == 6);
  CHECK(ds.grid.n_x == 16);
  CHECK(ds.split == Split::validation);

  SUBCASE("single-group load matches the filtered full load") {
    const Dataset heat_only = load_dataset(path, PdeId::heat);
    REQUIRE(heat_only.items.size() == 2);
    for (const auto& t : heat_only.items) CHECK(t.pde == PdeId::heat);
    CHECK(heat_only.items[0].u.v == ds.items[0].u.v);
  }

  SUBCASE("payloads are bit-identical across regenerations") {
    const std::string again = (dir / "tiny2.h5").string();
    write_dataset(req, again);
    const Dataset ds2 = load_dataset(again);
    REQUIRE(ds2.items.size() == ds.items.size());
    for (size_t i = 0; i < ds.items.size(); ++i) {
      CHECK(ds.items[i].u.v == ds2.items[i].u.v);
      CHECK(ds.items[i].seed == ds2.items[i].seed);
    }
  }

  SUBCASE("incomplete or foreign files are rejected") {
    CHECK(!dataset_complete((dir / "missing.h5").string()));
    CHECK_THROWS_AS(load_dataset(manifest_path_for(path)), IoError);
  }

  fs::remove_all(dir);
}

TEST_CASE("generation is deterministic per sample") {
  GenerateRequest req;
  req.split = Split::finetune;
  req.dist = Distribution::in_dist;
  req.resolution = 16;
  req.count_per_pde = 1;
  req.master_seed = 7;
  const Trajectory a = generate_sample(req, PdeId::burgers, 0);
  const Trajectory b = generate_sample(req, PdeId::burgers, 0);
  CHECK(a.u.v == b.u.v);
  CHECK(a.seed == b.seed);
  CHECK(a.coeffs.nu == b.coeffs.nu);
}
