#pragma once

#include <cstdint>

#include "pclab/point_cloud.hpp"
#include "pclab/tape.hpp"

namespace pclab {

/// k nearest neighbors of every point by Euclidean distance, self excluded,
/// ties broken by the lower index. Exact brute force; requires k < N.
IdxMat knn(const MatX3f& points, int k);

/// Per-point normals from the covariance of the k-neighborhood (point plus
/// its k nearest neighbors): eigenvector of the smallest eigenvalue,
/// oriented away from the cloud centroid, unit length. Neighborhoods whose
/// two smallest eigenvalues coincide (within 1e-9) fall back to the radial
/// direction; a point sitting on the centroid gets +z.
MatX3f estimate_normals(const MatX3f& points, int k = 16);

/// Symmetric averaged squared nearest-neighbor distance:
/// (1/|A|) sum_a min_b |a-b|^2 + (1/|B|) sum_b min_a |b-a|^2.
double chamfer(const MatX3f& a, const MatX3f& b);
double chamfer(const PointCloud& a, const PointCloud& b);

/// One-sided Hausdorff, max over a of the distance to its nearest b.
double hausdorff(const MatX3f& a, const MatX3f& b);
double hausdorff(const PointCloud& a, const PointCloud& b);

/// Per-point RMS of the coordinate difference: |A-B|_F / sqrt(N).
/// Requires equal sizes with points in correspondence.
double l2_dist(const MatX3f& a, const MatX3f& b);
double l2_dist(const PointCloud& a, const PointCloud& b);

/// Largest per-point Euclidean displacement between corresponding points.
double linf_dist(const MatX3f& a, const MatX3f& b);

/// Chamfer distance between a tape variable ({N,3}) and a fixed cloud,
/// differentiable in the variable: gradients flow through the matched
/// nearest-neighbor pairs of the current assignment.
Var chamfer_to_fixed(Var pts, const MatX3f& fixed);

}  // namespace pclab
