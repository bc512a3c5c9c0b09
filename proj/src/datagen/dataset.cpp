#include "pdebench/datagen/dataset.hpp"

#include <hdf5.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <thread>

#include <nlohmann/json.hpp>

#include "pdebench/datagen/solvers.hpp"

namespace pdebench {
namespace {

constexpr int kFormatVersion = 1;

std::vector<PdeId> effective_pdes(const GenerateRequest& req) {
  if (!req.pdes.empty()) return req.pdes;
  return {PdeId::heat, PdeId::advection, PdeId::burgers};
}

struct H5Check {
  // Turns the HDF5 C API's negative-return convention into exceptions.
  static hid_t id(hid_t v, const char* what) {
    if (v < 0) throw IoError(std::string("hdf5: ") + what + " failed");
    return v;
  }
  static void status(herr_t v, const char* what) {
    if (v < 0) throw IoError(std::string("hdf5: ") + what + " failed");
  }
};

hid_t make_ocpl(hid_t cls) {
  hid_t p = H5Check::id(H5Pcreate(cls), "property list");
  // Object timestamps off: identical inputs must give identical bytes.
  H5Check::status(H5Pset_obj_track_times(p, false), "disable timestamps");
  return p;
}

void write_scalar_attr_double(hid_t loc, const char* name, double v) {
  hid_t space = H5Check::id(H5Screate(H5S_SCALAR), "attr space");
  hid_t attr = H5Check::id(
      H5Acreate2(loc, name, H5T_NATIVE_DOUBLE, space, H5P_DEFAULT, H5P_DEFAULT),
      name);
  H5Check::status(H5Awrite(attr, H5T_NATIVE_DOUBLE, &v), name);
  H5Aclose(attr);
  H5Sclose(space);
}

void write_scalar_attr_int(hid_t loc, const char* name, int64_t v) {
  hid_t space = H5Check::id(H5Screate(H5S_SCALAR), "attr space");
  hid_t attr = H5Check::id(
      H5Acreate2(loc, name, H5T_NATIVE_INT64, space, H5P_DEFAULT, H5P_DEFAULT),
      name);
  H5Check::status(H5Awrite(attr, H5T_NATIVE_INT64, &v), name);
  H5Aclose(attr);
  H5Sclose(space);
}

void write_scalar_attr_string(hid_t loc, const char* name,
                              const std::string& v) {
  hid_t type = H5Check::id(H5Tcopy(H5T_C_S1), "string type");
  H5Check::status(H5Tset_size(type, v.size() + 1), "string size");
  hid_t space = H5Check::id(H5Screate(H5S_SCALAR), "attr space");
  hid_t attr = H5Check::id(
      H5Acreate2(loc, name, type, space, H5P_DEFAULT, H5P_DEFAULT), name);
  H5Check::status(H5Awrite(attr, type, v.c_str()), name);
  H5Aclose(attr);
  H5Sclose(space);
  H5Tclose(type);
}

double read_attr_double(hid_t loc, const char* name) {
  hid_t attr = H5Check::id(H5Aopen(loc, name, H5P_DEFAULT), name);
  double v = 0;
  H5Check::status(H5Aread(attr, H5T_NATIVE_DOUBLE, &v), name);
  H5Aclose(attr);
  return v;
}

int64_t read_attr_int(hid_t loc, const char* name) {
  hid_t attr = H5Check::id(H5Aopen(loc, name, H5P_DEFAULT), name);
  int64_t v = 0;
  H5Check::status(H5Aread(attr, H5T_NATIVE_INT64, &v), name);
  H5Aclose(attr);
  return v;
}

std::string read_attr_string(hid_t loc, const char* name) {
  hid_t attr = H5Check::id(H5Aopen(loc, name, H5P_DEFAULT), name);
  hid_t type = H5Aget_type(attr);
  const size_t n = H5Tget_size(type);
  std::string buf(n, '\0');
  H5Check::status(H5Aread(attr, type, buf.data()), name);
  H5Tclose(type);
  H5Aclose(attr);
  buf.resize(std::strlen(buf.c_str()));
  return buf;
}

void overwrite_attr_int(hid_t loc, const char* name, int64_t v) {
  hid_t attr = H5Check::id(H5Aopen(loc, name, H5P_DEFAULT), name);
  H5Check::status(H5Awrite(attr, H5T_NATIVE_INT64, &v), name);
  H5Aclose(attr);
}

void write_root_attrs(hid_t file, const GridSpec& g, Split split,
                      Distribution dist, uint64_t master_seed) {
  write_scalar_attr_int(file, "format_version", kFormatVersion);
  write_scalar_attr_int(file, "n_t", g.n_t);
  write_scalar_attr_int(file, "n_x", g.n_x);
  write_scalar_attr_int(file, "n_y", g.n_y);
  write_scalar_attr_double(file, "x_min", g.x_min);
  write_scalar_attr_double(file, "x_max", g.x_max);
  write_scalar_attr_double(file, "y_min", g.y_min);
  write_scalar_attr_double(file, "y_max", g.y_max);
  write_scalar_attr_double(file, "t_end", g.t_end);
  write_scalar_attr_string(file, "split", to_string(split));
  write_scalar_attr_string(file, "distribution", to_string(dist));
  write_scalar_attr_int(file, "master_seed", static_cast<int64_t>(master_seed));
  write_scalar_attr_int(file, "complete", 0);
}

}  // namespace

uint64_t sample_seed(uint64_t master, Split split, Distribution dist,
                     PdeId pde, int index) {
  uint64_t s = hash_str(master, to_string(split));
  s = hash_str(s, to_string(dist));
  s = hash_str(s, to_string(pde));
  return hash_combine(s, static_cast<uint64_t>(index));
}

uint64_t ic_stream_seed(uint64_t master, Split split, Distribution dist,
                        PdeId pde, int index) {
  // Out-distribution Burgers reuses the in-distribution initial conditions.
  Distribution ic_dist = dist;
  if (pde == PdeId::burgers && dist == Distribution::out_dist)
    ic_dist = Distribution::in_dist;
  return hash_str(sample_seed(master, split, ic_dist, pde, index), "ic");
}

uint64_t coeff_stream_seed(uint64_t master, Split split, Distribution dist,
                           PdeId pde, int index) {
  return hash_str(sample_seed(master, split, dist, pde, index), "coeff");
}

Trajectory generate_sample(const GenerateRequest& req, PdeId pde, int index) {
  const GridSpec g = GridSpec::standard(pde, req.resolution);
  Trajectory t;
  t.pde = pde;
  t.dist = req.dist;
  t.sample_index = index;
  t.seed = sample_seed(req.master_seed, req.split, req.dist, pde, index);

  RngStream ic_rng(ic_stream_seed(req.master_seed, req.split, req.dist, pde,
                                  index));
  std::vector<double> ic;
  if (pde == PdeId::navier_stokes) {
    ic = sample_grf_ic(g, ic_rng);
  } else {
    t.ic_params = sample_sine_ic_params(ic_rng);
    t.has_sine_ic = true;
    ic.resize(static_cast<size_t>(g.n_x) * g.n_y);
    eval_sine_ic(t.ic_params, g, ic.data());
  }

  RngStream coeff_rng(coeff_stream_seed(req.master_seed, req.split, req.dist,
                                        pde, index));
  t.coeffs = sample_coefficients(pde, req.dist, coeff_rng);

  Volume u;
  switch (pde) {
    case PdeId::heat: u = solve_heat(ic, g, t.coeffs); break;
    case PdeId::advection: u = solve_advection(ic, g, t.coeffs); break;
    case PdeId::burgers: u = solve_burgers(ic, g, t.coeffs); break;
    case PdeId::navier_stokes: u = solve_navier_stokes(ic, g, t.coeffs); break;
  }

  t.u = VolumeF(u.d0, u.d1, u.d2);
  for (size_t i = 0; i < u.size(); ++i) t.u.v[i] = static_cast<float>(u.v[i]);
  return t;
}

namespace {

// Runs fn(index) for every index in [0, n) across req.workers threads.
// Exceptions are rethrown on the caller thread with sample identification.
void parallel_for_samples(int n, int workers, PdeId pde,
                          const std::function<void(int)>& fn) {
  workers = std::max(1, workers);
  if (workers == 1) {
    for (int i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (const BenchError& e) {
        throw NonFiniteError(to_string(pde) + " sample " + std::to_string(i) +
                             ": " + e.what());
      }
    }
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::string> errors(workers);
  std::atomic<int> next{0};
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (const std::exception& e) {
          errors[w] = to_string(pde) + " sample " + std::to_string(i) + ": " +
                      e.what();
          return;
        }
      }
    });
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (!e.empty()) throw NonFiniteError(e);
}

}  // namespace

Dataset generate_dataset(const GenerateRequest& req) {
  if (req.count_per_pde <= 0)
    throw ConfigError("generate: count_per_pde must be positive");
  Dataset ds;
  ds.split = req.split;
  ds.dist = req.dist;
  const auto pdes = effective_pdes(req);
  ds.grid = GridSpec::standard(pdes.front(), req.resolution);
  ds.items.resize(pdes.size() * static_cast<size_t>(req.count_per_pde));
  size_t base = 0;
  for (PdeId pde : pdes) {
    parallel_for_samples(req.count_per_pde, req.workers, pde, [&](int i) {
      ds.items[base + i] = generate_sample(req, pde, i);
    });
    base += req.count_per_pde;
  }
  return ds;
}

namespace {

void write_group(hid_t file, const std::string& name,
                 const std::vector<Trajectory>& items, const GridSpec& g) {
  const hsize_t n = items.size();
  hid_t gcpl = make_ocpl(H5P_GROUP_CREATE);
  hid_t grp = H5Check::id(
      H5Gcreate2(file, name.c_str(), H5P_DEFAULT, gcpl, H5P_DEFAULT), "group");
  H5Pclose(gcpl);

  {
    hsize_t dims[4] = {n, static_cast<hsize_t>(g.n_t),
                       static_cast<hsize_t>(g.n_x), static_cast<hsize_t>(g.n_y)};
    hid_t space = H5Check::id(H5Screate_simple(4, dims, nullptr), "u space");
    hid_t dcpl = make_ocpl(H5P_DATASET_CREATE);
    hid_t dset = H5Check::id(H5Dcreate2(grp, "u", H5T_IEEE_F32LE, space, H5P_DEFAULT,
                                        dcpl, H5P_DEFAULT),
                             "u dataset");
    hsize_t one[4] = {1, dims[1], dims[2], dims[3]};
    hid_t mem = H5Check::id(H5Screate_simple(4, one, nullptr), "u mem space");
    for (hsize_t i = 0; i < n; ++i) {
      hsize_t off[4] = {i, 0, 0, 0};
      H5Check::status(
          H5Sselect_hyperslab(space, H5S_SELECT_SET, off, nullptr, one, nullptr),
          "u hyperslab");
      H5Check::status(H5Dwrite(dset, H5T_NATIVE_FLOAT, mem, space, H5P_DEFAULT,
                               items[i].u.v.data()),
                      "u write");
    }
    H5Sclose(mem);
    H5Dclose(dset);
    H5Pclose(dcpl);
    H5Sclose(space);
  }
  {
    std::vector<double> coeffs(n * 4);
    for (hsize_t i = 0; i < n; ++i) {
      coeffs[i * 4 + 0] = items[i].coeffs.nu;
      coeffs[i * 4 + 1] = items[i].coeffs.c_x;
      coeffs[i * 4 + 2] = items[i].coeffs.c_y;
      coeffs[i * 4 + 3] = items[i].coeffs.amplitude;
    }
    hsize_t dims[2] = {n, 4};
    hid_t space = H5Check::id(H5Screate_simple(2, dims, nullptr), "coeff space");
    hid_t dcpl = make_ocpl(H5P_DATASET_CREATE);
    hid_t dset = H5Check::id(
        H5Dcreate2(grp, "coeffs", H5T_IEEE_F64LE, space, H5P_DEFAULT, dcpl,
                   H5P_DEFAULT),
        "coeff dataset");
    H5Check::status(H5Dwrite(dset, H5T_NATIVE_DOUBLE, H5S_ALL, H5S_ALL,
                             H5P_DEFAULT, coeffs.data()),
                    "coeff write");
    H5Dclose(dset);
    H5Pclose(dcpl);
    H5Sclose(space);
  }
  {
    std::vector<uint64_t> seeds(n);
    for (hsize_t i = 0; i < n; ++i) seeds[i] = items[i].seed;
    hsize_t dims[1] = {n};
    hid_t space = H5Check::id(H5Screate_simple(1, dims, nullptr), "seed space");
    hid_t dcpl = make_ocpl(H5P_DATASET_CREATE);
    hid_t dset = H5Check::id(
        H5Dcreate2(grp, "seeds", H5T_STD_U64LE, space, H5P_DEFAULT, dcpl,
                   H5P_DEFAULT),
        "seed dataset");
    H5Check::status(H5Dwrite(dset, H5T_NATIVE_UINT64, H5S_ALL, H5S_ALL,
                             H5P_DEFAULT, seeds.data()),
                    "seed write");
    H5Dclose(dset);
    H5Pclose(dcpl);
    H5Sclose(space);
  }
  H5Gclose(grp);
}

}  // namespace

void save_dataset(const Dataset& ds, uint64_t master_seed,
                  const std::string& h5_path) {
  hid_t fcpl = make_ocpl(H5P_FILE_CREATE);
  hid_t file = H5Check::id(
      H5Fcreate(h5_path.c_str(), H5F_ACC_TRUNC, fcpl, H5P_DEFAULT), "create");
  H5Pclose(fcpl);
  write_root_attrs(file, ds.grid, ds.split, ds.dist, master_seed);

  // Group items by pde, preserving first-appearance order.
  std::vector<PdeId> order;
  for (const auto& t : ds.items)
    if (std::find(order.begin(), order.end(), t.pde) == order.end())
      order.push_back(t.pde);
  for (PdeId pde : order) {
    std::vector<Trajectory> grp_items;
    for (const auto& t : ds.items)
      if (t.pde == pde) grp_items.push_back(t);
    write_group(file, to_string(pde), grp_items, ds.grid);
  }
  overwrite_attr_int(file, "complete", 1);
  H5Fclose(file);
}

DatasetManifest write_dataset(const GenerateRequest& req,
                              const std::string& h5_path) {
  Dataset ds = generate_dataset(req);
  save_dataset(ds, req.master_seed, h5_path);

  DatasetManifest m;
  m.file = h5_path;
  m.split = req.split;
  m.dist = req.dist;
  m.resolution = req.resolution;
  m.format_version = kFormatVersion;
  m.master_seed = req.master_seed;
  for (PdeId pde : effective_pdes(req))
    m.counts.emplace_back(to_string(pde), req.count_per_pde);

  std::ofstream out(manifest_path_for(h5_path));
  if (!out) throw IoError("manifest: cannot write " + manifest_path_for(h5_path));
  out << manifest_to_json(m) << "\n";
  return m;
}

bool dataset_complete(const std::string& h5_path) {
  H5E_auto2_t old_fn = nullptr;
  void* old_data = nullptr;
  H5Eget_auto2(H5E_DEFAULT, &old_fn, &old_data);
  H5Eset_auto2(H5E_DEFAULT, nullptr, nullptr);
  bool ok = false;
  hid_t file = H5Fopen(h5_path.c_str(), H5F_ACC_RDONLY, H5P_DEFAULT);
  if (file >= 0) {
    hid_t attr = H5Aopen(file, "complete", H5P_DEFAULT);
    if (attr >= 0) {
      int64_t v = 0;
      if (H5Aread(attr, H5T_NATIVE_INT64, &v) >= 0) ok = v == 1;
      H5Aclose(attr);
    }
    H5Fclose(file);
  }
  H5Eset_auto2(H5E_DEFAULT, old_fn, old_data);
  return ok;
}

Dataset load_dataset(const std::string& h5_path, std::optional<PdeId> only) {
  hid_t file = H5Fopen(h5_path.c_str(), H5F_ACC_RDONLY, H5P_DEFAULT);
  if (file < 0) throw IoError("hdf5: cannot open " + h5_path);

  Dataset ds;
  GridSpec& g = ds.grid;
  if (read_attr_int(file, "format_version") != kFormatVersion)
    throw IoError("hdf5: unsupported format version in " + h5_path);
  g.n_t = static_cast<int>(read_attr_int(file, "n_t"));
  g.n_x = static_cast<int>(read_attr_int(file, "n_x"));
  g.n_y = static_cast<int>(read_attr_int(file, "n_y"));
  g.x_min = read_attr_double(file, "x_min");
  g.x_max = read_attr_double(file, "x_max");
  g.y_min = read_attr_double(file, "y_min");
  g.y_max = read_attr_double(file, "y_max");
  g.t_end = read_attr_double(file, "t_end");
  ds.split = split_from_string(read_attr_string(file, "split"));
  ds.dist = distribution_from_string(read_attr_string(file, "distribution"));
  if (read_attr_int(file, "complete") != 1)
    throw IoError("hdf5: " + h5_path + " is marked incomplete");

  for (const char* name :
       {"heat", "advection", "burgers", "navier_stokes"}) {
    if (only && pde_from_string(name) != *only) continue;
    if (H5Lexists(file, name, H5P_DEFAULT) <= 0) continue;
    hid_t grp = H5Check::id(H5Gopen2(file, name, H5P_DEFAULT), "group open");
    hid_t dset = H5Check::id(H5Dopen2(grp, "u", H5P_DEFAULT), "u open");
    hid_t space = H5Dget_space(dset);
    hsize_t dims[4];
    H5Sget_simple_extent_dims(space, dims, nullptr);
    const hsize_t n = dims[0];

    std::vector<double> coeffs(n * 4);
    {
      hid_t cd = H5Check::id(H5Dopen2(grp, "coeffs", H5P_DEFAULT), "coeffs");
      H5Check::status(H5Dread(cd, H5T_NATIVE_DOUBLE, H5S_ALL, H5S_ALL,
                              H5P_DEFAULT, coeffs.data()),
                      "coeffs read");
      H5Dclose(cd);
    }
    std::vector<uint64_t> seeds(n);
    {
      hid_t sd = H5Check::id(H5Dopen2(grp, "seeds", H5P_DEFAULT), "seeds");
      H5Check::status(H5Dread(sd, H5T_NATIVE_UINT64, H5S_ALL, H5S_ALL,
                              H5P_DEFAULT, seeds.data()),
                      "seeds read");
      H5Dclose(sd);
    }

    hsize_t one[4] = {1, dims[1], dims[2], dims[3]};
    hid_t mem = H5Check::id(H5Screate_simple(4, one, nullptr), "u mem");
    for (hsize_t i = 0; i < n; ++i) {
      Trajectory t;
      t.pde = pde_from_string(name);
      t.dist = ds.dist;
      t.sample_index = static_cast<int>(i);
      t.seed = seeds[i];
      t.coeffs.nu = coeffs[i * 4 + 0];
      t.coeffs.c_x = coeffs[i * 4 + 1];
      t.coeffs.c_y = coeffs[i * 4 + 2];
      t.coeffs.amplitude = coeffs[i * 4 + 3];
      t.u = VolumeF(static_cast<int>(dims[1]), static_cast<int>(dims[2]),
                    static_cast<int>(dims[3]));
      hsize_t off[4] = {i, 0, 0, 0};
      H5Check::status(
          H5Sselect_hyperslab(space, H5S_SELECT_SET, off, nullptr, one, nullptr),
          "u hyperslab");
      H5Check::status(H5Dread(dset, H5T_NATIVE_FLOAT, mem, space, H5P_DEFAULT,
                              t.u.v.data()),
                      "u read");
      ds.items.push_back(std::move(t));
    }
    H5Sclose(mem);
    H5Sclose(space);
    H5Dclose(dset);
    H5Gclose(grp);
  }
  H5Fclose(file);
  return ds;
}

std::string manifest_path_for(const std::string& h5_path) {
  return h5_path + ".manifest.json";
}

std::string manifest_to_json(const DatasetManifest& m) {
  nlohmann::json j;
  j["file"] = m.file;
  j["split"] = to_string(m.split);
  j["distribution"] = to_string(m.dist);
  j["resolution"] = m.resolution;
  j["format_version"] = m.format_version;
  j["master_seed"] = m.master_seed;
  nlohmann::json counts;
  for (const auto& [pde, n] : m.counts) counts[pde] = n;
  j["counts"] = counts;
  return j.dump(2);
}

}  // namespace pdebench
