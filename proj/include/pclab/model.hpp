#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pclab/tensor.hpp"

namespace pclab {

enum class Arch { pointnet_mini, edgeconv_lite };

std::string arch_name(Arch a);
Arch arch_from_name(const std::string& name);

/// Architecture description. per_point_dims includes the input width, so
/// {3,32,64} describes two per-point layers; head_dims holds the hidden
/// widths of the classifier head.
struct ModelSpec {
  Arch arch = Arch::pointnet_mini;
  std::vector<int> per_point_dims;
  std::vector<int> head_dims;
  int num_classes = 8;
  int neighbor_k = 8;  // edgeconv only

  static ModelSpec pointnet_mini(int num_classes = 8);
  static ModelSpec edgeconv_lite(int num_classes = 8);

  int num_per_point_layers() const {
    return static_cast<int>(per_point_dims.size()) - 1;
  }
  /// "conv1", "conv2", ... one per per-point layer.
  std::vector<std::string> feature_layer_names() const;
  int feature_layer_index(const std::string& name) const;
  int feature_dim(int layer_index) const {
    return per_point_dims[static_cast<size_t>(layer_index) + 1];
  }

  void validate() const;
  bool operator==(const ModelSpec&) const = default;
};

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

struct ModelParams {
  ModelSpec spec;
  std::vector<NamedTensor> tensors;
  std::string dataset_hash;  // with seed: the training fingerprint
  std::uint64_t seed = 0;

  const Tensor& find(const std::string& name) const;
  Tensor& find(const std::string& name);
};

/// Glorot-uniform weights, zero biases, deterministic in the seed.
ModelParams init_params(const ModelSpec& spec, std::uint64_t seed);

/// Checkpoint: `<stem>.json` header (spec, tensor table with byte ranges,
/// fingerprint) plus `<stem>.bin`, the float32 little-endian tensor blob
/// concatenated in table order. Bit-exact round trip.
void save_checkpoint(const ModelParams& params, const std::filesystem::path& stem);
ModelParams load_checkpoint(const std::filesystem::path& stem);

}  // namespace pclab
