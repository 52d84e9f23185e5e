#include "pclab/model.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

#include "pclab/common.hpp"
#include "pclab/rng.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint blobs are little-endian");

namespace pclab {

namespace fs = std::filesystem;
using nlohmann::json;

std::string arch_name(Arch a) {
  return a == Arch::pointnet_mini ? "pointnet_mini" : "edgeconv_lite";
}

Arch arch_from_name(const std::string& name) {
  if (name == "pointnet_mini") return Arch::pointnet_mini;
  if (name == "edgeconv_lite") return Arch::edgeconv_lite;
  throw DataError("unknown architecture '" + name + "'");
}

ModelSpec ModelSpec::pointnet_mini(int num_classes) {
  ModelSpec s;
  s.arch = Arch::pointnet_mini;
  s.per_point_dims = {3, 32, 64, 128};
  s.head_dims = {64};
  s.num_classes = num_classes;
  return s;
}

ModelSpec ModelSpec::edgeconv_lite(int num_classes) {
  ModelSpec s;
  s.arch = Arch::edgeconv_lite;
  s.per_point_dims = {3, 32, 64};
  s.head_dims = {64};
  s.num_classes = num_classes;
  s.neighbor_k = 8;
  return s;
}

std::vector<std::string> ModelSpec::feature_layer_names() const {
  std::vector<std::string> names;
  for (int i = 0; i < num_per_point_layers(); ++i)
    names.push_back("conv" + std::to_string(i + 1));
  return names;
}

int ModelSpec::feature_layer_index(const std::string& name) const {
  const auto names = feature_layer_names();
  for (size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  throw std::invalid_argument("unknown feature layer '" + name + "'");
}

void ModelSpec::validate() const {
  if (per_point_dims.size() < 3)
    throw std::invalid_argument("model spec: need at least 2 per-point layers");
  if (per_point_dims.front() != 3)
    throw std::invalid_argument("model spec: input width must be 3");
  if (num_classes < 2) throw std::invalid_argument("model spec: C >= 2");
  for (int d : per_point_dims)
    if (d <= 0) throw std::invalid_argument("model spec: non-positive width");
  for (int d : head_dims)
    if (d <= 0) throw std::invalid_argument("model spec: non-positive width");
  if (arch == Arch::edgeconv_lite && neighbor_k < 1)
    throw std::invalid_argument("model spec: neighbor_k >= 1");
}

const Tensor& ModelParams::find(const std::string& name) const {
  for (const auto& t : tensors)
    if (t.name == name) return t.tensor;
  throw std::invalid_argument("no parameter named '" + name + "'");
}

Tensor& ModelParams::find(const std::string& name) {
  for (auto& t : tensors)
    if (t.name == name) return t.tensor;
  throw std::invalid_argument("no parameter named '" + name + "'");
}

namespace {

Tensor glorot(int rows, int cols, Rng& rng) {
  Tensor w({rows, cols});
  const float bound = std::sqrt(6.0f / static_cast<float>(rows + cols));
  for (long i = 0; i < w.size(); ++i) w[i] = rng.uniform(-bound, bound);
  return w;
}

}  // namespace

ModelParams init_params(const ModelSpec& spec, std::uint64_t seed) {
  spec.validate();
  ModelParams p;
  p.spec = spec;
  p.seed = seed;
  Rng rng(derive_seed(seed, 0x1217u));

  // Per-point layers. Edge convolutions see [center, neighbor - center],
  // doubling the input width.
  const int in_mult = spec.arch == Arch::edgeconv_lite ? 2 : 1;
  for (int i = 0; i < spec.num_per_point_layers(); ++i) {
    const int d_in = spec.per_point_dims[static_cast<size_t>(i)] * in_mult;
    const int d_out = spec.per_point_dims[static_cast<size_t>(i) + 1];
    const std::string base = "conv" + std::to_string(i + 1);
    p.tensors.push_back({base + ".weight", glorot(d_in, d_out, rng)});
    p.tensors.push_back({base + ".bias", Tensor({d_out})});
  }

  int width = spec.per_point_dims.back();
  for (size_t i = 0; i < spec.head_dims.size(); ++i) {
    const int d_out = spec.head_dims[i];
    const std::string base = "head" + std::to_string(i + 1);
    p.tensors.push_back({base + ".weight", glorot(width, d_out, rng)});
    p.tensors.push_back({base + ".bias", Tensor({d_out})});
    width = d_out;
  }
  p.tensors.push_back({"out.weight", glorot(width, spec.num_classes, rng)});
  p.tensors.push_back({"out.bias", Tensor({spec.num_classes})});
  return p;
}

namespace {

json spec_to_json(const ModelSpec& s) {
  return json{{"arch", arch_name(s.arch)},
              {"per_point_dims", s.per_point_dims},
              {"head_dims", s.head_dims},
              {"num_classes", s.num_classes},
              {"neighbor_k", s.neighbor_k}};
}

ModelSpec spec_from_json(const json& j) {
  ModelSpec s;
  s.arch = arch_from_name(j.at("arch").get<std::string>());
  s.per_point_dims = j.at("per_point_dims").get<std::vector<int>>();
  s.head_dims = j.at("head_dims").get<std::vector<int>>();
  s.num_classes = j.at("num_classes").get<int>();
  s.neighbor_k = j.at("neighbor_k").get<int>();
  s.validate();
  return s;
}

}  // namespace

void save_checkpoint(const ModelParams& params, const fs::path& stem) {
  fs::path header_path = stem;
  header_path += ".json";
  fs::path blob_path = stem;
  blob_path += ".bin";

  json table = json::array();
  std::uint64_t offset = 0;
  for (const auto& t : params.tensors) {
    const std::uint64_t bytes =
        static_cast<std::uint64_t>(t.tensor.size()) * sizeof(float);
    table.push_back({{"name", t.name},
                     {"shape", t.tensor.shape()},
                     {"byte_offset", offset},
                     {"byte_length", bytes}});
    offset += bytes;
  }
  const json header = {{"format_version", 1},
                       {"spec", spec_to_json(params.spec)},
                       {"tensors", table},
                       {"dataset_hash", params.dataset_hash},
                       {"seed", params.seed},
                       {"blob", blob_path.filename().string()}};

  std::ofstream hout(header_path);
  if (!hout) throw DataError("cannot write " + header_path.string());
  hout << header.dump(2) << "\n";

  std::ofstream bout(blob_path, std::ios::binary);
  if (!bout) throw DataError("cannot write " + blob_path.string());
  for (const auto& t : params.tensors)
    bout.write(reinterpret_cast<const char*>(t.tensor.data()),
               static_cast<std::streamsize>(t.tensor.size() * sizeof(float)));
  if (!bout) throw DataError("blob write failed: " + blob_path.string());
}

ModelParams load_checkpoint(const fs::path& stem) {
  // Accept either the stem or the header path itself.
  fs::path header_path = stem;
  if (header_path.extension() != ".json") header_path += ".json";

  std::ifstream hin(header_path);
  if (!hin) throw DataError("cannot open checkpoint: " + header_path.string());
  json header;
  try {
    hin >> header;
  } catch (const json::exception& e) {
    throw DataError(header_path.string() + ": bad JSON: " + e.what());
  }
  if (header.value("format_version", 0) != 1)
    throw DataError(header_path.string() + ": unsupported format_version");

  ModelParams params;
  params.spec = spec_from_json(header.at("spec"));
  params.dataset_hash = header.value("dataset_hash", "");
  params.seed = header.value("seed", std::uint64_t{0});

  const fs::path blob_path =
      header_path.parent_path() / header.at("blob").get<std::string>();
  std::ifstream bin(blob_path, std::ios::binary);
  if (!bin) throw DataError("cannot open blob: " + blob_path.string());

  for (const auto& entry : header.at("tensors")) {
    NamedTensor t;
    t.name = entry.at("name").get<std::string>();
    t.tensor = Tensor(entry.at("shape").get<std::vector<int>>());
    const auto offset = entry.at("byte_offset").get<std::uint64_t>();
    const auto length = entry.at("byte_length").get<std::uint64_t>();
    if (length != static_cast<std::uint64_t>(t.tensor.size()) * sizeof(float))
      throw DataError(header_path.string() + ": byte_length mismatch for " + t.name);
    bin.seekg(static_cast<std::streamoff>(offset));
    bin.read(reinterpret_cast<char*>(t.tensor.data()),
             static_cast<std::streamsize>(length));
    if (!bin) throw DataError("blob truncated: " + blob_path.string());
    if (!t.tensor.all_finite())
      throw DataError("checkpoint tensor " + t.name + " has non-finite values");
    params.tensors.push_back(std::move(t));
  }
  return params;
}

}  // namespace pclab
