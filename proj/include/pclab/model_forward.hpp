#pragma once

#include <memory>
#include <optional>

#include "pclab/model.hpp"
#include "pclab/ops.hpp"
#include "pclab/point_cloud.hpp"

namespace pclab {

/// Intermediate feature map of a named layer (N x C_k) and, when filled,
/// the matching importance weights: the gradient of the guidance target
/// with respect to each feature entry.
struct FeatureTap {
  std::string layer;
  RowMatXf features;
  RowMatXf weights;
};

struct ForwardOptions {
  std::string tap_layer;             // empty: no tap recorded
  bool input_requires_grad = false;  // track d/d(points)
  bool params_require_grad = false;  // track d/d(weights)
  /// Re-enters the tap as a gradient-tracked leaf, detaching it from the
  /// layers below. Gives d(target)/d(features) without tracking anything else.
  bool tap_as_leaf = false;
  /// Replaces the tap layer's output; used to probe the tap-to-logit map.
  const RowMatXf* tap_override = nullptr;
};

/// One recorded forward pass. Holds the tape so gradients for the input,
/// the parameters or the tap can be pulled after backward().
struct ForwardPass {
  std::unique_ptr<Tape> tape;
  Var input;                    // {N,3}
  std::vector<Var> param_vars;  // aligned with ModelParams::tensors
  Var tap;                      // {N,C_k} when a tap layer was requested
  Var logits;                   // {C}
};

ForwardPass run_forward(const ModelParams& params, const MatX3f& points,
                        const ForwardOptions& opt = {});

/// Logits only.
Eigen::VectorXf forward(const ModelParams& params, const PointCloud& cloud);
Eigen::VectorXf forward(const ModelParams& params, const MatX3f& points);

/// argmax class, ties to the lowest index.
int predict(const ModelParams& params, const PointCloud& cloud);
int predict(const ModelParams& params, const MatX3f& points);
int argmax_class(const Eigen::VectorXf& logits);

/// Logits plus the named layer's post-activation features.
std::pair<Eigen::VectorXf, FeatureTap> forward_with_tap(
    const ModelParams& params, const PointCloud& cloud,
    const std::string& layer);

enum class GuidanceTarget { logit, loss };

/// Feature importance: d(target)/d(features) at the given cloud, target
/// being the true-class logit (default) or the classification loss.
FeatureTap feature_importance(const ModelParams& params, const PointCloud& cloud,
                              int label, const std::string& layer,
                              GuidanceTarget target = GuidanceTarget::logit);

/// d(classification loss)/d(point coordinates), N x 3.
MatX3f input_gradient(const ModelParams& params, const MatX3f& points, int label);

}  // namespace pclab
