#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace pclab {

struct AdamConfig {
  float learning_rate = 1e-3f;
  float beta1 = 0.9f;
  float beta2 = 0.999f;
  float eps = 1e-8f;
};

/// Adam with bias correction over one flat parameter block.
class Adam {
 public:
  Adam(long n, AdamConfig cfg = {}) : cfg_(cfg) {
    m_.setZero(n);
    v_.setZero(n);
  }

  /// In-place update, param -= lr * m_hat / (sqrt(v_hat) + eps).
  void step(float* param, const float* grad, long n) {
    if (n != m_.size()) throw std::invalid_argument("Adam: size mismatch");
    ++t_;
    const float c1 = 1.0f - std::pow(cfg_.beta1, static_cast<float>(t_));
    const float c2 = 1.0f - std::pow(cfg_.beta2, static_cast<float>(t_));
    Eigen::Map<Eigen::ArrayXf> p(param, n);
    Eigen::Map<const Eigen::ArrayXf> g(grad, n);
    m_ = cfg_.beta1 * m_ + (1.0f - cfg_.beta1) * g;
    v_ = cfg_.beta2 * v_ + (1.0f - cfg_.beta2) * g * g;
    p -= cfg_.learning_rate * (m_ / c1) / ((v_ / c2).sqrt() + cfg_.eps);
  }

  long steps_taken() const { return t_; }
  const Eigen::ArrayXf& first_moment() const { return m_; }
  const Eigen::ArrayXf& second_moment() const { return v_; }

 private:
  AdamConfig cfg_;
  Eigen::ArrayXf m_, v_;
  long t_ = 0;
};

}  // namespace pclab
