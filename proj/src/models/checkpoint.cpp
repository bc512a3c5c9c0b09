#include "pdebench/models/checkpoint.hpp"

#include <hdf5.h>

#include <cstring>
#include <vector>

namespace pdebench {
namespace {

struct H5Check {
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
  H5Check::status(H5Pset_obj_track_times(p, false), "disable timestamps");
  return p;
}

void write_string_attr(hid_t loc, const char* name, const std::string& s) {
  hid_t type = H5Check::id(H5Tcopy(H5T_C_S1), "string type");
  H5Tset_size(type, s.size() + 1);
  hid_t space = H5Check::id(H5Screate(H5S_SCALAR), "attr space");
  hid_t attr = H5Check::id(
      H5Acreate2(loc, name, type, space, H5P_DEFAULT, H5P_DEFAULT), name);
  H5Check::status(H5Awrite(attr, type, s.c_str()), name);
  H5Aclose(attr);
  H5Sclose(space);
  H5Tclose(type);
}

std::string read_string_attr(hid_t loc, const char* name) {
  hid_t attr = H5Check::id(H5Aopen(loc, name, H5P_DEFAULT), name);
  hid_t type = H5Aget_type(attr);
  size_t len = H5Tget_size(type);
  std::vector<char> buf(len + 1, '\0');
  H5Check::status(H5Aread(attr, type, buf.data()), name);
  H5Tclose(type);
  H5Aclose(attr);
  return std::string(buf.data());
}

nlohmann::json meta_to_json(const CheckpointMeta& m) {
  return {{"format_version", 1},
          {"model", model_config_to_json(m.config)},
          {"strategy", m.strategy},
          {"augmentation", m.augmentation},
          {"task", m.task},
          {"dataset_hash", m.dataset_hash},
          {"config_hash", m.config_hash},
          {"seed", m.seed}};
}

CheckpointMeta meta_from_json(const nlohmann::json& j) {
  if (j.value("format_version", 0) != 1)
    throw IoError("checkpoint: unsupported format version");
  CheckpointMeta m;
  m.config = model_config_from_json(j.at("model"));
  m.strategy = j.value("strategy", "none");
  m.augmentation = j.value("augmentation", "none");
  m.task = j.value("task", "");
  m.dataset_hash = j.value("dataset_hash", "");
  m.config_hash = j.value("config_hash", "");
  m.seed = j.value("seed", uint64_t{0});
  return m;
}

}  // namespace

nlohmann::json model_config_to_json(const ModelConfig& c) {
  return {{"family", to_string(c.family)},
          {"in_frames", c.in_frames},
          {"out_frames", c.out_frames},
          {"fno_modes", c.fno_modes},
          {"fno_width", c.fno_width},
          {"fno_layers", c.fno_layers},
          {"deeponet_width", c.deeponet_width},
          {"deeponet_depth", c.deeponet_depth},
          {"oformer_hidden", c.oformer_hidden},
          {"oformer_heads", c.oformer_heads},
          {"oformer_encoder_depth", c.oformer_encoder_depth},
          {"oformer_decoder_depth", c.oformer_decoder_depth},
          {"oformer_ffn", c.oformer_ffn},
          {"oformer_propagator", c.oformer_propagator},
          {"unet_hidden", c.unet_hidden},
          {"unet_blocks", c.unet_blocks}};
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.family = model_family_from_string(j.at("family").get<std::string>());
  c.in_frames = j.value("in_frames", c.in_frames);
  c.out_frames = j.value("out_frames", c.out_frames);
  c.fno_modes = j.value("fno_modes", c.fno_modes);
  c.fno_width = j.value("fno_width", c.fno_width);
  c.fno_layers = j.value("fno_layers", c.fno_layers);
  c.deeponet_width = j.value("deeponet_width", c.deeponet_width);
  c.deeponet_depth = j.value("deeponet_depth", c.deeponet_depth);
  c.oformer_hidden = j.value("oformer_hidden", c.oformer_hidden);
  c.oformer_heads = j.value("oformer_heads", c.oformer_heads);
  c.oformer_encoder_depth =
      j.value("oformer_encoder_depth", c.oformer_encoder_depth);
  c.oformer_decoder_depth =
      j.value("oformer_decoder_depth", c.oformer_decoder_depth);
  c.oformer_ffn = j.value("oformer_ffn", c.oformer_ffn);
  c.oformer_propagator = j.value("oformer_propagator", c.oformer_propagator);
  c.unet_hidden = j.value("unet_hidden", c.unet_hidden);
  c.unet_blocks = j.value("unet_blocks", c.unet_blocks);
  c.validate();
  return c;
}

void save_checkpoint(const std::string& path, OperatorModel& model,
                     const CheckpointMeta& meta) {
  hid_t fcpl = make_ocpl(H5P_FILE_CREATE);
  hid_t file = H5Check::id(
      H5Fcreate(path.c_str(), H5F_ACC_TRUNC, fcpl, H5P_DEFAULT), path.c_str());
  H5Pclose(fcpl);

  write_string_attr(file, "metadata", meta_to_json(meta).dump());

  hid_t gcpl = make_ocpl(H5P_GROUP_CREATE);
  hid_t grp = H5Check::id(
      H5Gcreate2(file, "weights", H5P_DEFAULT, gcpl, H5P_DEFAULT), "weights");
  H5Pclose(gcpl);

  for (const auto& item : model.named_parameters()) {
    auto t = item.value().detach().to(torch::kFloat32).contiguous();
    std::vector<hsize_t> dims;
    for (auto d : t.sizes()) dims.push_back(static_cast<hsize_t>(d));
    if (dims.empty()) dims.push_back(1);
    hid_t space = H5Check::id(
        H5Screate_simple(static_cast<int>(dims.size()), dims.data(), nullptr),
        "weight space");
    hid_t dcpl = make_ocpl(H5P_DATASET_CREATE);
    hid_t dset = H5Check::id(
        H5Dcreate2(grp, item.key().c_str(), H5T_IEEE_F32LE, space, H5P_DEFAULT,
                   dcpl, H5P_DEFAULT),
        item.key().c_str());
    H5Check::status(H5Dwrite(dset, H5T_NATIVE_FLOAT, H5S_ALL, H5S_ALL,
                             H5P_DEFAULT, t.data_ptr<float>()),
                    item.key().c_str());
    H5Dclose(dset);
    H5Pclose(dcpl);
    H5Sclose(space);
  }
  H5Gclose(grp);
  H5Fclose(file);
}

LoadedCheckpoint read_checkpoint(const std::string& path) {
  hid_t file = H5Check::id(
      H5Fopen(path.c_str(), H5F_ACC_RDONLY, H5P_DEFAULT), path.c_str());
  LoadedCheckpoint ck;
  ck.meta = meta_from_json(
      nlohmann::json::parse(read_string_attr(file, "metadata")));

  hid_t grp = H5Check::id(H5Gopen2(file, "weights", H5P_DEFAULT), "weights");
  H5G_info_t info;
  H5Check::status(H5Gget_info(grp, &info), "weights info");
  for (hsize_t i = 0; i < info.nlinks; ++i) {
    ssize_t len = H5Lget_name_by_idx(grp, ".", H5_INDEX_NAME, H5_ITER_INC, i,
                                     nullptr, 0, H5P_DEFAULT);
    std::string name(static_cast<size_t>(len), '\0');
    H5Lget_name_by_idx(grp, ".", H5_INDEX_NAME, H5_ITER_INC, i, name.data(),
                       name.size() + 1, H5P_DEFAULT);
    hid_t dset = H5Check::id(H5Dopen2(grp, name.c_str(), H5P_DEFAULT),
                             name.c_str());
    hid_t space = H5Dget_space(dset);
    int rank = H5Sget_simple_extent_ndims(space);
    std::vector<hsize_t> dims(static_cast<size_t>(rank));
    H5Sget_simple_extent_dims(space, dims.data(), nullptr);
    std::vector<int64_t> sizes(dims.begin(), dims.end());
    auto t = torch::empty(sizes, torch::kFloat32);
    H5Check::status(H5Dread(dset, H5T_NATIVE_FLOAT, H5S_ALL, H5S_ALL,
                            H5P_DEFAULT, t.data_ptr<float>()),
                    name.c_str());
    ck.weights.emplace(name, t);
    H5Sclose(space);
    H5Dclose(dset);
  }
  H5Gclose(grp);
  H5Fclose(file);
  return ck;
}

int load_weights(OperatorModel& model,
                 const std::map<std::string, torch::Tensor>& weights) {
  torch::NoGradGuard ng;
  int skipped = 0;
  for (const auto& item : model.named_parameters()) {
    auto it = weights.find(item.key());
    if (it == weights.end() || it->second.sizes() != item.value().sizes()) {
      ++skipped;
      continue;
    }
    item.value().copy_(it->second.to(item.value().dtype()));
  }
  return skipped;
}

std::shared_ptr<OperatorModel> load_checkpoint_model(const std::string& path,
                                                     CheckpointMeta* meta_out) {
  auto ck = read_checkpoint(path);
  auto model = build_model(ck.meta.config, ck.meta.seed);
  const auto strategy = strategy_from_string(ck.meta.strategy);
  if (strategy_uses_head(strategy)) attach_head(*model, strategy);
  const int skipped = load_weights(*model, ck.weights);
  if (skipped != 0)
    throw IoError("checkpoint " + path + ": " + std::to_string(skipped) +
                  " parameters missing or mismatched");
  if (meta_out) *meta_out = ck.meta;
  return model;
}

}  // namespace pdebench
