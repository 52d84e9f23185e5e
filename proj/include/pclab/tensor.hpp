#pragma once

#include <Eigen/Dense>
#include <vector>

#include "pclab/common.hpp"

namespace pclab {

using RowMatXf =
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatX3f = Eigen::Matrix<float, Eigen::Dynamic, 3, Eigen::RowMajor>;
using IdxMat = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Dense float32 array of rank 1-3, row-major. Values are immutable once
/// they enter a tape; mutation is for construction only.
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
    data_.setZero(count(shape_));
  }

  static Tensor zeros(std::vector<int> shape) { return Tensor(std::move(shape)); }

  static Tensor scalar(float v) {
    Tensor t({1});
    t.data_[0] = v;
    return t;
  }

  static Tensor from_matrix(const Eigen::Ref<const RowMatXf>& m) {
    Tensor t({static_cast<int>(m.rows()), static_cast<int>(m.cols())});
    t.mat() = m;
    return t;
  }

  static Tensor from_vector(const Eigen::Ref<const Eigen::VectorXf>& v) {
    Tensor t({static_cast<int>(v.size())});
    t.vec() = v;
    return t;
  }

  int rank() const { return static_cast<int>(shape_.size()); }
  long size() const { return data_.size(); }
  const std::vector<int>& shape() const { return shape_; }
  int dim(int i) const { return shape_[static_cast<size_t>(i)]; }
  bool shape_equals(const Tensor& o) const { return shape_ == o.shape_; }

  float* data() { return data_.data(); }
  const float* data() const { return data_.data(); }
  float operator[](long i) const { return data_[i]; }
  float& operator[](long i) { return data_[i]; }

  /// Rank-2 view.
  Eigen::Map<RowMatXf> mat() {
    require_rank(2);
    return {data_.data(), shape_[0], shape_[1]};
  }
  Eigen::Map<const RowMatXf> mat() const {
    require_rank(2);
    return {data_.data(), shape_[0], shape_[1]};
  }

  /// Arbitrary rows x cols view over the flat storage (rows*cols == size).
  Eigen::Map<RowMatXf> as_matrix(long rows, long cols) {
    return {data_.data(), rows, cols};
  }
  Eigen::Map<const RowMatXf> as_matrix(long rows, long cols) const {
    return {data_.data(), rows, cols};
  }

  Eigen::Map<Eigen::ArrayXf> arr() { return {data_.data(), data_.size()}; }
  Eigen::Map<const Eigen::ArrayXf> arr() const {
    return {data_.data(), data_.size()};
  }

  Eigen::Map<Eigen::VectorXf> vec() { return {data_.data(), data_.size()}; }
  Eigen::Map<const Eigen::VectorXf> vec() const {
    return {data_.data(), data_.size()};
  }

  /// The single element of a size-1 tensor.
  float value() const {
    if (size() != 1) throw std::invalid_argument("Tensor::value: size != 1");
    return data_[0];
  }

  bool all_finite() const { return data_.isFinite().all(); }

 private:
  static long count(const std::vector<int>& shape) {
    if (shape.empty() || shape.size() > 3)
      throw std::invalid_argument("Tensor: rank must be 1-3");
    long n = 1;
    for (int d : shape) {
      if (d <= 0) throw std::invalid_argument("Tensor: non-positive dim");
      n *= d;
    }
    return n;
  }

  void require_rank(int r) const {
    if (rank() != r) throw std::invalid_argument("Tensor: rank mismatch");
  }

  std::vector<int> shape_;
  Eigen::ArrayXf data_;
};

}  // namespace pclab
