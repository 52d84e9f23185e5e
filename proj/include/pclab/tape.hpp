#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pclab/tensor.hpp"

namespace pclab {

class Tape;

/// Handle to a value recorded on a tape.
struct Var {
  Tape* tape = nullptr;
  int id = -1;

  bool valid() const { return tape != nullptr; }
  const Tensor& value() const;
};

/// Record of a single forward computation. Nodes are appended in execution
/// order, so every node's inputs precede it; the reverse sweep visits each
/// node exactly once. A tape serves one forward/backward pass and is
/// confined to one thread.
class Tape {
 public:
  /// Passed to backward functions: upstream gradient plus accumulation
  /// slots for the node's inputs.
  class BackwardCtx {
   public:
    const Tensor& grad_out() const { return grad_out_; }
    const Tensor& out() const { return out_; }
    const Tensor& in(int slot) const;
    /// Gradient accumulator for input `slot`, zero-initialized on first use.
    Tensor& grad_in(int slot);

   private:
    friend class Tape;
    BackwardCtx(Tape& tape, int node_id, const Tensor& grad_out)
        : tape_(tape), node_id_(node_id), grad_out_(grad_out), out_(tape.value(node_id)) {}
    Tape& tape_;
    int node_id_;
    const Tensor& grad_out_;
    const Tensor& out_;
  };

  using BackwardFn = std::function<void(BackwardCtx&)>;

  /// New gradient-tracked input.
  Var leaf(Tensor value) { return push("leaf", std::move(value), {}, nullptr, true); }

  /// New input that never receives a gradient.
  Var constant(Tensor value) {
    return push("const", std::move(value), {}, nullptr, false);
  }

  Var push(const char* op, Tensor value, std::vector<int> inputs,
           BackwardFn backward, bool force_requires_grad = false);

  const Tensor& value(int id) const { return nodes_[static_cast<size_t>(id)].value; }
  bool requires_grad(int id) const {
    return nodes_[static_cast<size_t>(id)].requires_grad;
  }
  long num_nodes() const { return static_cast<long>(nodes_.size()); }

  /// Reverse sweep from a scalar loss. May be called once per tape.
  void backward(Var loss);

  /// dLoss/dVar after backward(); zeros when no path reached the node.
  Tensor grad(Var v) const;

  /// When set, every pushed value is checked for NaN/Inf.
  bool finite_checks = false;

 private:
  struct Node {
    const char* op;
    Tensor value;
    std::vector<int> inputs;
    BackwardFn backward;
    bool requires_grad;
  };

  void check_owns(Var v) const;

  std::vector<Node> nodes_;
  std::vector<Tensor> grads_;
  bool ran_backward_ = false;
};

inline const Tensor& Var::value() const { return tape->value(id); }

}  // namespace pclab
