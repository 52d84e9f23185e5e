#include "pclab/model_forward.hpp"

#include "pclab/geometry.hpp"

namespace pclab {

namespace {

Var linear(Var x, Var w, Var b) { return add_rowvec(matmul(x, w), b); }

/// Edge features [center, neighbor - center] pushed through a shared MLP
/// layer, max-pooled over the k neighbors.
Var edge_conv_block(Var h, const IdxMat& idx, Var w, Var b) {
  const int n = h.value().dim(0);
  const int c = h.value().dim(1);
  const int k = static_cast<int>(idx.cols());
  Var neighbors = gather_rows(h, idx);     // {N,K,C}
  Var centers = repeat_rows(h, k);         // {N,K,C}
  Var edge = concat_channels(centers, sub(neighbors, centers));
  Var flat = reshape(edge, {n * k, 2 * c});
  Var z = relu(linear(flat, w, b));
  const int c_out = w.value().dim(1);
  return max_over_neighbors(reshape(z, {n, k, c_out}));  // {N,C_out}
}

}  // namespace

ForwardPass run_forward(const ModelParams& params, const MatX3f& points,
                        const ForwardOptions& opt) {
  params.spec.validate();
  if (points.rows() < kMinCloudPoints)
    throw std::invalid_argument("forward: cloud smaller than 16 points");

  ForwardPass fp;
  fp.tape = std::make_unique<Tape>();
  Tape& tape = *fp.tape;

  Tensor in = Tensor::from_matrix(points);
  fp.input = opt.input_requires_grad ? tape.leaf(std::move(in))
                                     : tape.constant(std::move(in));

  fp.param_vars.reserve(params.tensors.size());
  for (const auto& t : params.tensors)
    fp.param_vars.push_back(opt.params_require_grad
                                ? tape.leaf(t.tensor)
                                : tape.constant(t.tensor));

  auto param = [&](const std::string& name) -> Var {
    for (size_t i = 0; i < params.tensors.size(); ++i)
      if (params.tensors[i].name == name) return fp.param_vars[i];
    throw std::invalid_argument("no parameter named '" + name + "'");
  };

  const ModelSpec& spec = params.spec;
  const int tap_index =
      opt.tap_layer.empty() ? -1 : spec.feature_layer_index(opt.tap_layer);

  IdxMat idx;
  if (spec.arch == Arch::edgeconv_lite)
    idx = knn(points, std::min<int>(spec.neighbor_k,
                                    static_cast<int>(points.rows()) - 1));

  Var h = fp.input;
  for (int layer = 0; layer < spec.num_per_point_layers(); ++layer) {
    const std::string base = "conv" + std::to_string(layer + 1);
    if (spec.arch == Arch::pointnet_mini)
      h = relu(linear(h, param(base + ".weight"), param(base + ".bias")));
    else
      h = edge_conv_block(h, idx, param(base + ".weight"), param(base + ".bias"));

    if (layer == tap_index) {
      if (opt.tap_override != nullptr) {
        if (opt.tap_override->rows() != h.value().dim(0) ||
            opt.tap_override->cols() != h.value().dim(1))
          throw std::invalid_argument("tap override shape mismatch");
        h = tape.constant(Tensor::from_matrix(*opt.tap_override));
      } else if (opt.tap_as_leaf) {
        h = tape.leaf(h.value());
      }
      fp.tap = h;
    }
  }

  Var pooled = max_over_points(h);  // {1, C_last}
  for (size_t i = 0; i < spec.head_dims.size(); ++i) {
    const std::string base = "head" + std::to_string(i + 1);
    pooled = relu(linear(pooled, param(base + ".weight"), param(base + ".bias")));
  }
  Var out = linear(pooled, param("out.weight"), param("out.bias"));
  fp.logits = reshape(out, {spec.num_classes});
  return fp;
}

Eigen::VectorXf forward(const ModelParams& params, const MatX3f& points) {
  ForwardPass fp = run_forward(params, points);
  return fp.logits.value().vec();
}

Eigen::VectorXf forward(const ModelParams& params, const PointCloud& cloud) {
  return forward(params, cloud.points);
}

int argmax_class(const Eigen::VectorXf& logits) {
  int best = 0;
  for (int j = 1; j < logits.size(); ++j)
    if (logits[j] > logits[best]) best = j;
  return best;
}

int predict(const ModelParams& params, const MatX3f& points) {
  return argmax_class(forward(params, points));
}

int predict(const ModelParams& params, const PointCloud& cloud) {
  return predict(params, cloud.points);
}

std::pair<Eigen::VectorXf, FeatureTap> forward_with_tap(
    const ModelParams& params, const PointCloud& cloud,
    const std::string& layer) {
  ForwardOptions opt;
  opt.tap_layer = layer;
  ForwardPass fp = run_forward(params, cloud.points, opt);
  FeatureTap tap;
  tap.layer = layer;
  tap.features = fp.tap.value().mat();
  return {fp.logits.value().vec(), std::move(tap)};
}

FeatureTap feature_importance(const ModelParams& params, const PointCloud& cloud,
                              int label, const std::string& layer,
                              GuidanceTarget target) {
  if (label < 0 || label >= params.spec.num_classes)
    throw std::invalid_argument("feature_importance: label out of range");

  ForwardOptions opt;
  opt.tap_layer = layer;
  opt.tap_as_leaf = true;
  ForwardPass fp = run_forward(params, cloud.points, opt);
  fp.tape->backward(target == GuidanceTarget::logit
                        ? pick(fp.logits, label)
                        : cross_entropy_logits(fp.logits, label));

  FeatureTap tap;
  tap.layer = layer;
  tap.features = fp.tap.value().mat();
  tap.weights = fp.tape->grad(fp.tap).mat();
  return tap;
}

MatX3f input_gradient(const ModelParams& params, const MatX3f& points, int label) {
  ForwardOptions opt;
  opt.input_requires_grad = true;
  ForwardPass fp = run_forward(params, points, opt);
  fp.tape->backward(cross_entropy_logits(fp.logits, label));
  const Tensor g = fp.tape->grad(fp.input);
  return Eigen::Map<const MatX3f>(g.data(), points.rows(), 3);
}

}  // namespace pclab
