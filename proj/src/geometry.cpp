#include "pclab/geometry.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "pclab/common.hpp"

namespace pclab {

namespace {

inline float sq_dist(const MatX3f& pts, long i, long j) {
  const float dx = pts(i, 0) - pts(j, 0);
  const float dy = pts(i, 1) - pts(j, 1);
  const float dz = pts(i, 2) - pts(j, 2);
  return dx * dx + dy * dy + dz * dz;
}

}  // namespace

void PointCloud::validate() const {
  if (normals.rows() != points.rows())
    throw DataError("point cloud: normals/points count mismatch");
  if (!points.allFinite() || !normals.allFinite())
    throw DataError("point cloud: non-finite values");
  for (long i = 0; i < normals.rows(); ++i) {
    const float len = normals.row(i).norm();
    if (std::abs(len - 1.0f) > 1e-4f)
      throw DataError("point cloud: normal " + std::to_string(i) +
                      " is not unit length");
  }
}

void Dataset::validate() const {
  if (classes.empty() || train.empty() || test.empty())
    throw DataError("dataset: empty class list or split");
  for (const auto* split : {&train, &test})
    for (const auto& s : *split)
      if (s.label < 0 || s.label >= num_classes())
        throw DataError("dataset: label out of range");
}

IdxMat knn(const MatX3f& points, int k) {
  const long n = points.rows();
  if (k <= 0 || k >= n) throw std::invalid_argument("knn: need 0 < k < N");

  IdxMat out(n, k);
  std::vector<std::pair<float, int>> cand(static_cast<size_t>(n) - 1);
  for (long i = 0; i < n; ++i) {
    size_t m = 0;
    for (long j = 0; j < n; ++j) {
      if (j == i) continue;
      cand[m++] = {sq_dist(points, i, j), static_cast<int>(j)};
    }
    std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
    for (int q = 0; q < k; ++q) out(i, q) = cand[static_cast<size_t>(q)].second;
  }
  return out;
}

MatX3f estimate_normals(const MatX3f& points, int k) {
  const long n = points.rows();
  if (k < 3) throw std::invalid_argument("estimate_normals: k >= 3");
  if (k >= n) k = static_cast<int>(n) - 1;

  const Eigen::Vector3d centroid = points.cast<double>().colwise().mean();
  const IdxMat nbr = knn(points, k);

  MatX3f normals(n, 3);
  for (long i = 0; i < n; ++i) {
    Eigen::Vector3d mean = points.row(i).cast<double>();
    for (int q = 0; q < k; ++q) mean += points.row(nbr(i, q)).cast<double>();
    mean /= static_cast<double>(k + 1);

    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    auto accumulate = [&](long idx) {
      const Eigen::Vector3d d = points.row(idx).cast<double>() - mean;
      cov += d * d.transpose();
    };
    accumulate(i);
    for (int q = 0; q < k; ++q) accumulate(nbr(i, q));
    cov /= static_cast<double>(k + 1);

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    Eigen::Vector3d normal;
    const Eigen::Vector3d radial = points.row(i).cast<double>() - centroid;
    if (eig.eigenvalues()(1) - eig.eigenvalues()(0) < 1e-9) {
      // Degenerate neighborhood; the smallest eigenvector is arbitrary.
      if (radial.norm() > 1e-12)
        normal = radial.normalized();
      else
        normal = Eigen::Vector3d::UnitZ();
    } else {
      normal = eig.eigenvectors().col(0);
      if (normal.dot(radial) < 0.0) normal = -normal;
      normal.normalize();
    }
    normals.row(i) = normal.cast<float>();
    normals.row(i).normalize();
  }
  return normals;
}

double chamfer(const MatX3f& a, const MatX3f& b) {
  if (a.rows() == 0 || b.rows() == 0)
    throw std::invalid_argument("chamfer: empty cloud");
  double sum_a = 0.0, sum_b = 0.0;
  for (long i = 0; i < a.rows(); ++i) {
    float best = std::numeric_limits<float>::max();
    for (long j = 0; j < b.rows(); ++j)
      best = std::min(best, (a.row(i) - b.row(j)).squaredNorm());
    sum_a += static_cast<double>(best);
  }
  for (long j = 0; j < b.rows(); ++j) {
    float best = std::numeric_limits<float>::max();
    for (long i = 0; i < a.rows(); ++i)
      best = std::min(best, (a.row(i) - b.row(j)).squaredNorm());
    sum_b += static_cast<double>(best);
  }
  return sum_a / static_cast<double>(a.rows()) +
         sum_b / static_cast<double>(b.rows());
}

double chamfer(const PointCloud& a, const PointCloud& b) {
  return chamfer(a.points, b.points);
}

double hausdorff(const MatX3f& a, const MatX3f& b) {
  if (a.rows() == 0 || b.rows() == 0)
    throw std::invalid_argument("hausdorff: empty cloud");
  double worst = 0.0;
  for (long i = 0; i < a.rows(); ++i) {
    float best = std::numeric_limits<float>::max();
    for (long j = 0; j < b.rows(); ++j)
      best = std::min(best, (a.row(i) - b.row(j)).squaredNorm());
    worst = std::max(worst, std::sqrt(static_cast<double>(best)));
  }
  return worst;
}

double hausdorff(const PointCloud& a, const PointCloud& b) {
  return hausdorff(a.points, b.points);
}

double l2_dist(const MatX3f& a, const MatX3f& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("l2_dist: size mismatch");
  const double fro = (a - b).cast<double>().norm();
  return fro / std::sqrt(static_cast<double>(a.rows()));
}

double l2_dist(const PointCloud& a, const PointCloud& b) {
  return l2_dist(a.points, b.points);
}

double linf_dist(const MatX3f& a, const MatX3f& b) {
  if (a.rows() != b.rows())
    throw std::invalid_argument("linf_dist: size mismatch");
  double worst = 0.0;
  for (long i = 0; i < a.rows(); ++i)
    worst = std::max(worst, static_cast<double>((a.row(i) - b.row(i)).norm()));
  return worst;
}

Var chamfer_to_fixed(Var pts, const MatX3f& fixed) {
  const Tensor& pv = pts.value();
  if (pv.rank() != 2 || pv.dim(1) != 3)
    throw std::invalid_argument("chamfer_to_fixed: need {N,3}");
  if (fixed.rows() == 0) throw std::invalid_argument("chamfer_to_fixed: empty ref");

  const long n = pv.dim(0);
  const long m = fixed.rows();
  Eigen::Map<const MatX3f> a(pv.data(), n, 3);

  // Nearest fixed point for every variable point, and vice versa.
  std::vector<int> nn_a(static_cast<size_t>(n));
  std::vector<int> nn_b(static_cast<size_t>(m));
  double sum_a = 0.0;
  for (long i = 0; i < n; ++i) {
    float best = std::numeric_limits<float>::max();
    int bj = 0;
    for (long j = 0; j < m; ++j) {
      const float d = (a.row(i) - fixed.row(j)).squaredNorm();
      if (d < best) {
        best = d;
        bj = static_cast<int>(j);
      }
    }
    nn_a[static_cast<size_t>(i)] = bj;
    sum_a += static_cast<double>(best);
  }
  double sum_b = 0.0;
  for (long j = 0; j < m; ++j) {
    float best = std::numeric_limits<float>::max();
    int bi = 0;
    for (long i = 0; i < n; ++i) {
      const float d = (a.row(i) - fixed.row(j)).squaredNorm();
      if (d < best) {
        best = d;
        bi = static_cast<int>(i);
      }
    }
    nn_b[static_cast<size_t>(j)] = bi;
    sum_b += static_cast<double>(best);
  }
  const double value =
      sum_a / static_cast<double>(n) + sum_b / static_cast<double>(m);

  MatX3f fixed_copy = fixed;
  return pts.tape->push(
      "chamfer", Tensor::scalar(static_cast<float>(value)), {pts.id},
      [nn_a = std::move(nn_a), nn_b = std::move(nn_b),
       fixed = std::move(fixed_copy), n, m](Tape::BackwardCtx& ctx) {
        const float go = ctx.grad_out().value();
        Eigen::Map<const MatX3f> av(ctx.in(0).data(), n, 3);
        Tensor& gt = ctx.grad_in(0);
        Eigen::Map<MatX3f> g(gt.data(), n, 3);
        const float wa = go * 2.0f / static_cast<float>(n);
        for (long i = 0; i < n; ++i)
          g.row(i) += wa * (av.row(i) - fixed.row(nn_a[static_cast<size_t>(i)]));
        const float wb = go * 2.0f / static_cast<float>(m);
        for (long j = 0; j < m; ++j) {
          const int i = nn_b[static_cast<size_t>(j)];
          g.row(i) += wb * (av.row(i) - fixed.row(j));
        }
      });
}

}  // namespace pclab
