#include "pclab/tape.hpp"

#include "pclab/common.hpp"

namespace pclab {

const Tensor& Tape::BackwardCtx::in(int slot) const {
  const auto& node = tape_.nodes_[static_cast<size_t>(node_id_)];
  return tape_.value(node.inputs[static_cast<size_t>(slot)]);
}

Tensor& Tape::BackwardCtx::grad_in(int slot) {
  const auto& node = tape_.nodes_[static_cast<size_t>(node_id_)];
  const int id = node.inputs[static_cast<size_t>(slot)];
  Tensor& g = tape_.grads_[static_cast<size_t>(id)];
  if (g.size() == 0) g = Tensor::zeros(tape_.value(id).shape());
  return g;
}

Var Tape::push(const char* op, Tensor value, std::vector<int> inputs,
               BackwardFn backward, bool force_requires_grad) {
  if (finite_checks && !value.all_finite())
    throw NumericError(std::string("non-finite output of op '") + op + "'");
  bool requires = force_requires_grad;
  for (int id : inputs) requires = requires || requires_grad(id);
  nodes_.push_back(Node{op, std::move(value), std::move(inputs),
                        std::move(backward), requires});
  return Var{this, static_cast<int>(nodes_.size()) - 1};
}

void Tape::check_owns(Var v) const {
  if (v.tape != this || v.id < 0 || v.id >= num_nodes())
    throw std::invalid_argument("Tape: var does not belong to this tape");
}

void Tape::backward(Var loss) {
  check_owns(loss);
  if (ran_backward_) throw std::logic_error("Tape: backward already ran");
  if (value(loss.id).size() != 1)
    throw std::invalid_argument("Tape: backward needs a scalar loss");
  ran_backward_ = true;

  grads_.assign(nodes_.size(), Tensor{});
  grads_[static_cast<size_t>(loss.id)] = Tensor::scalar(1.0f);

  for (int id = loss.id; id >= 0; --id) {
    Node& node = nodes_[static_cast<size_t>(id)];
    const Tensor& g = grads_[static_cast<size_t>(id)];
    if (!node.requires_grad || g.size() == 0 || !node.backward) continue;
    BackwardCtx ctx(*this, id, g);
    node.backward(ctx);
    if (finite_checks && !g.all_finite())
      throw NumericError(std::string("non-finite gradient at op '") + node.op + "'");
  }
}

Tensor Tape::grad(Var v) const {
  check_owns(v);
  if (!ran_backward_) throw std::logic_error("Tape: grad before backward");
  const Tensor& g = grads_[static_cast<size_t>(v.id)];
  if (g.size() == 0) return Tensor::zeros(value(v.id).shape());
  return g;
}

}  // namespace pclab
