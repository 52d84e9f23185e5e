#pragma once

#include <filesystem>
#include <string>

#include "pclab/point_cloud.hpp"

namespace pclab {

/// `.xyzn`: one point per line, "x y z [nx ny nz]", '#' starts a comment.
/// Written with enough digits that write/read round-trips float32 exactly.
void write_cloud(const PointCloud& cloud, const std::filesystem::path& path);

struct LoadedCloud {
  PointCloud cloud;
  /// True when the file had no normal columns and they were estimated.
  bool normals_estimated = false;
};

LoadedCloud read_cloud(const std::filesystem::path& path);

/// Writes `<dir>/clouds/*.xyzn` plus `<dir>/manifest.csv`
/// (header `path,label,split`, paths relative to the manifest).
void save_dataset(const Dataset& ds, const std::filesystem::path& dir);

Dataset load_dataset(const std::filesystem::path& manifest);

/// FNV-1a over class names and the train split, as a hex string. Ties a
/// checkpoint to the data it was trained on.
std::string dataset_hash(const Dataset& ds);

}  // namespace pclab
