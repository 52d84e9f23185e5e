#pragma once

#include <string>
#include <vector>

#include "pclab/tensor.hpp"

namespace pclab {

/// Minimum cloud size accepted by attacks, training and defenses.
inline constexpr int kMinCloudPoints = 16;

/// N x 3 coordinates with per-point unit normals. Clouds produced by the
/// dataset generator are centered and scaled into the unit sphere.
struct PointCloud {
  MatX3f points;
  MatX3f normals;

  long size() const { return points.rows(); }

  /// Checks finiteness, matching normal count and unit-length normals
  /// (within 1e-4). Throws DataError.
  void validate() const;
};

struct LabeledCloud {
  PointCloud cloud;
  int label = 0;
  std::string class_name;
};

struct Dataset {
  std::vector<std::string> classes;
  std::vector<LabeledCloud> train;
  std::vector<LabeledCloud> test;

  int num_classes() const { return static_cast<int>(classes.size()); }
  void validate() const;
};

}  // namespace pclab
