#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pclab/point_cloud.hpp"
#include "pclab/rng.hpp"

namespace pclab {

enum class ShapeClass {
  sphere,
  cube,
  cylinder,
  cone,
  torus,
  pyramid,
  ellipsoid,
  helix,
};

inline constexpr int kNumShapeClasses = 8;

const std::vector<std::string>& shape_class_names();
ShapeClass shape_class_from_name(const std::string& name);

/// Surface sample with random up-axis rotation, per-axis scale in
/// [0.8, 1.2], coordinate jitter sigma 0.005, then centered and scaled to
/// the unit sphere, with normals estimated. Pure function of its arguments.
PointCloud generate_shape(ShapeClass cls, int n_points, std::uint64_t seed);

struct DatasetSpec {
  int per_class_train = 200;
  int per_class_test = 50;
  int points_per_cloud = 256;
  std::uint64_t seed = 1;
};

/// Synthetic 8-class dataset. Splits are interleaved round-robin over
/// classes so any prefix is class-balanced.
Dataset generate_dataset(const DatasetSpec& spec);

namespace detail {
/// Raw parametric-surface sample, before rotation/scale/jitter.
MatX3f sample_surface(ShapeClass cls, int n, Rng& rng);
}  // namespace detail

}  // namespace pclab
