#include "pclab/ops.hpp"

#include <cmath>

namespace pclab {

namespace {

Tape& same_tape(Var a, Var b) {
  if (a.tape != b.tape || a.tape == nullptr)
    throw std::invalid_argument("ops: vars from different tapes");
  return *a.tape;
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.shape_equals(b))
    throw std::invalid_argument(std::string(op) + ": shape mismatch");
}

}  // namespace

Var add(Var a, Var b) {
  Tape& t = same_tape(a, b);
  require_same_shape(a.value(), b.value(), "add");
  Tensor out(a.value().shape());
  out.arr() = a.value().arr() + b.value().arr();
  return t.push("add", std::move(out), {a.id, b.id}, [](Tape::BackwardCtx& ctx) {
    ctx.grad_in(0).arr() += ctx.grad_out().arr();
    ctx.grad_in(1).arr() += ctx.grad_out().arr();
  });
}

Var sub(Var a, Var b) {
  Tape& t = same_tape(a, b);
  require_same_shape(a.value(), b.value(), "sub");
  Tensor out(a.value().shape());
  out.arr() = a.value().arr() - b.value().arr();
  return t.push("sub", std::move(out), {a.id, b.id}, [](Tape::BackwardCtx& ctx) {
    ctx.grad_in(0).arr() += ctx.grad_out().arr();
    ctx.grad_in(1).arr() -= ctx.grad_out().arr();
  });
}

Var mul(Var a, Var b) {
  Tape& t = same_tape(a, b);
  require_same_shape(a.value(), b.value(), "mul");
  Tensor out(a.value().shape());
  out.arr() = a.value().arr() * b.value().arr();
  return t.push("mul", std::move(out), {a.id, b.id}, [](Tape::BackwardCtx& ctx) {
    ctx.grad_in(0).arr() += ctx.grad_out().arr() * ctx.in(1).arr();
    ctx.grad_in(1).arr() += ctx.grad_out().arr() * ctx.in(0).arr();
  });
}

Var scale(Var a, float s) {
  Tensor out(a.value().shape());
  out.arr() = a.value().arr() * s;
  return a.tape->push("scale", std::move(out), {a.id},
                      [s](Tape::BackwardCtx& ctx) {
                        ctx.grad_in(0).arr() += ctx.grad_out().arr() * s;
                      });
}

Var relu(Var a) {
  Tensor out(a.value().shape());
  out.arr() = a.value().arr().max(0.0f);
  return a.tape->push("relu", std::move(out), {a.id}, [](Tape::BackwardCtx& ctx) {
    ctx.grad_in(0).arr() +=
        ctx.grad_out().arr() * (ctx.in(0).arr() > 0.0f).cast<float>();
  });
}

Var add_rowvec(Var m, Var bias) {
  Tape& t = same_tape(m, bias);
  const Tensor& mv = m.value();
  const Tensor& bv = bias.value();
  if (mv.rank() != 2 || bv.rank() != 1 || bv.dim(0) != mv.dim(1))
    throw std::invalid_argument("add_rowvec: need {R,C} and {C}");
  Tensor out(mv.shape());
  out.mat() = mv.mat();
  out.mat().rowwise() += bv.vec().transpose();
  return t.push("add_rowvec", std::move(out), {m.id, bias.id},
                [](Tape::BackwardCtx& ctx) {
                  ctx.grad_in(0).arr() += ctx.grad_out().arr();
                  ctx.grad_in(1).vec() +=
                      ctx.grad_out().mat().colwise().sum().transpose();
                });
}

Var matmul(Var a, Var b) {
  Tape& t = same_tape(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.rank() != 2 || bv.rank() != 2 || av.dim(1) != bv.dim(0))
    throw std::invalid_argument("matmul: inner dimensions disagree");
  Tensor out({av.dim(0), bv.dim(1)});
  out.mat().noalias() = av.mat() * bv.mat();
  return t.push("matmul", std::move(out), {a.id, b.id},
                [](Tape::BackwardCtx& ctx) {
                  ctx.grad_in(0).mat().noalias() +=
                      ctx.grad_out().mat() * ctx.in(1).mat().transpose();
                  ctx.grad_in(1).mat().noalias() +=
                      ctx.in(0).mat().transpose() * ctx.grad_out().mat();
                });
}

Var max_over_points(Var m) {
  const Tensor& mv = m.value();
  if (mv.rank() != 2) throw std::invalid_argument("max_over_points: rank-2 only");
  const int n = mv.dim(0), c = mv.dim(1);
  Tensor out({1, c});
  std::vector<int> argmax(static_cast<size_t>(c), 0);
  auto in = mv.mat();
  for (int j = 0; j < c; ++j) {
    float best = in(0, j);
    int bi = 0;
    for (int i = 1; i < n; ++i) {
      if (in(i, j) > best) {
        best = in(i, j);
        bi = i;
      }
    }
    out.mat()(0, j) = best;
    argmax[static_cast<size_t>(j)] = bi;
  }
  return m.tape->push("max_over_points", std::move(out), {m.id},
                      [argmax = std::move(argmax)](Tape::BackwardCtx& ctx) {
                        auto g = ctx.grad_in(0).mat();
                        auto go = ctx.grad_out().mat();
                        for (int j = 0; j < go.cols(); ++j)
                          g(argmax[static_cast<size_t>(j)], j) += go(0, j);
                      });
}

Var max_over_neighbors(Var t) {
  const Tensor& tv = t.value();
  if (tv.rank() != 3) throw std::invalid_argument("max_over_neighbors: rank-3 only");
  const int n = tv.dim(0), k = tv.dim(1), c = tv.dim(2);
  Tensor out({n, c});
  std::vector<int> argmax(static_cast<size_t>(n) * c, 0);
  const float* src = tv.data();
  float* dst = out.data();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < c; ++j) {
      float best = src[(static_cast<long>(i) * k) * c + j];
      int bk = 0;
      for (int q = 1; q < k; ++q) {
        const float v = src[(static_cast<long>(i) * k + q) * c + j];
        if (v > best) {
          best = v;
          bk = q;
        }
      }
      dst[static_cast<long>(i) * c + j] = best;
      argmax[static_cast<size_t>(i) * c + j] = bk;
    }
  }
  return t.tape->push(
      "max_over_neighbors", std::move(out), {t.id},
      [argmax = std::move(argmax), n, k, c](Tape::BackwardCtx& ctx) {
        float* g = ctx.grad_in(0).data();
        const float* go = ctx.grad_out().data();
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < c; ++j) {
            const int bk = argmax[static_cast<size_t>(i) * c + j];
            g[(static_cast<long>(i) * k + bk) * c + j] +=
                go[static_cast<long>(i) * c + j];
          }
      });
}

Var reduce_sum(Var a) {
  const double s = a.value().arr().cast<double>().sum();
  return a.tape->push("reduce_sum", Tensor::scalar(static_cast<float>(s)),
                      {a.id}, [](Tape::BackwardCtx& ctx) {
                        ctx.grad_in(0).arr() += ctx.grad_out().value();
                      });
}

Var reduce_mean(Var a) {
  const double n = static_cast<double>(a.value().size());
  const double s = a.value().arr().cast<double>().sum() / n;
  return a.tape->push("reduce_mean", Tensor::scalar(static_cast<float>(s)),
                      {a.id}, [inv = 1.0f / static_cast<float>(n)](Tape::BackwardCtx& ctx) {
                        ctx.grad_in(0).arr() += ctx.grad_out().value() * inv;
                      });
}

Var cross_entropy_logits(Var logits, int label) {
  const Tensor& lv = logits.value();
  if (lv.rank() != 1 || lv.size() < 2)
    throw std::invalid_argument("cross_entropy_logits: need rank-1 logits, C >= 2");
  const int c = static_cast<int>(lv.size());
  if (label < 0 || label >= c)
    throw std::invalid_argument("cross_entropy_logits: label out of range");

  const float m = lv.arr().maxCoeff();
  double denom = 0.0;
  for (int j = 0; j < c; ++j) denom += std::exp(static_cast<double>(lv[j] - m));
  const double lse = static_cast<double>(m) + std::log(denom);
  const double loss = lse - static_cast<double>(lv[label]);

  std::vector<float> softmax(static_cast<size_t>(c));
  for (int j = 0; j < c; ++j)
    softmax[static_cast<size_t>(j)] =
        static_cast<float>(std::exp(static_cast<double>(lv[j] - m)) / denom);

  return logits.tape->push(
      "cross_entropy", Tensor::scalar(static_cast<float>(loss)), {logits.id},
      [softmax = std::move(softmax), label](Tape::BackwardCtx& ctx) {
        auto g = ctx.grad_in(0).arr();
        const float go = ctx.grad_out().value();
        for (int j = 0; j < static_cast<int>(softmax.size()); ++j)
          g[j] += go * softmax[static_cast<size_t>(j)];
        g[label] -= go;
      });
}

Var pick(Var v, int index) {
  const Tensor& tv = v.value();
  if (tv.rank() != 1) throw std::invalid_argument("pick: rank-1 only");
  if (index < 0 || index >= tv.size())
    throw std::invalid_argument("pick: index out of range");
  return v.tape->push("pick", Tensor::scalar(tv[index]), {v.id},
                      [index](Tape::BackwardCtx& ctx) {
                        ctx.grad_in(0)[index] += ctx.grad_out().value();
                      });
}

Var gather_rows(Var m, IdxMat idx) {
  const Tensor& mv = m.value();
  if (mv.rank() != 2) throw std::invalid_argument("gather_rows: rank-2 source");
  const int n = static_cast<int>(idx.rows());
  const int k = static_cast<int>(idx.cols());
  const int c = mv.dim(1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j)
      if (idx(i, j) < 0 || idx(i, j) >= mv.dim(0))
        throw std::invalid_argument("gather_rows: index out of bounds");

  Tensor out({n, k, c});
  auto src = mv.mat();
  auto dst = out.as_matrix(static_cast<long>(n) * k, c);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j)
      dst.row(static_cast<long>(i) * k + j) = src.row(idx(i, j));

  return m.tape->push("gather_rows", std::move(out), {m.id},
                      [idx = std::move(idx), c](Tape::BackwardCtx& ctx) {
                        auto g = ctx.grad_in(0).mat();
                        auto go = ctx.grad_out().as_matrix(
                            idx.rows() * idx.cols(), c);
                        for (long i = 0; i < idx.rows(); ++i)
                          for (long j = 0; j < idx.cols(); ++j)
                            g.row(idx(i, j)) += go.row(i * idx.cols() + j);
                      });
}

Var repeat_rows(Var m, int k) {
  const Tensor& mv = m.value();
  if (mv.rank() != 2 || k <= 0)
    throw std::invalid_argument("repeat_rows: rank-2 source, k > 0");
  const int n = mv.dim(0), c = mv.dim(1);
  Tensor out({n, k, c});
  auto src = mv.mat();
  auto dst = out.as_matrix(static_cast<long>(n) * k, c);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) dst.row(static_cast<long>(i) * k + j) = src.row(i);
  return m.tape->push("repeat_rows", std::move(out), {m.id},
                      [n, k, c](Tape::BackwardCtx& ctx) {
                        auto g = ctx.grad_in(0).mat();
                        auto go = ctx.grad_out().as_matrix(static_cast<long>(n) * k, c);
                        for (int i = 0; i < n; ++i)
                          for (int j = 0; j < k; ++j)
                            g.row(i) += go.row(static_cast<long>(i) * k + j);
                      });
}

Var concat_channels(Var a, Var b) {
  Tape& t = same_tape(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.rank() != bv.rank())
    throw std::invalid_argument("concat_channels: rank mismatch");
  for (int i = 0; i + 1 < av.rank(); ++i)
    if (av.dim(i) != bv.dim(i))
      throw std::invalid_argument("concat_channels: leading dims differ");

  const int ca = av.dim(av.rank() - 1);
  const int cb = bv.dim(bv.rank() - 1);
  const long rows = av.size() / ca;
  std::vector<int> shape = av.shape();
  shape.back() = ca + cb;
  Tensor out(shape);
  auto dst = out.as_matrix(rows, ca + cb);
  dst.leftCols(ca) = av.as_matrix(rows, ca);
  dst.rightCols(cb) = bv.as_matrix(rows, cb);
  return t.push("concat_channels", std::move(out), {a.id, b.id},
                [rows, ca, cb](Tape::BackwardCtx& ctx) {
                  auto go = ctx.grad_out().as_matrix(rows, ca + cb);
                  ctx.grad_in(0).as_matrix(rows, ca) += go.leftCols(ca);
                  ctx.grad_in(1).as_matrix(rows, cb) += go.rightCols(cb);
                });
}

Var reshape(Var a, std::vector<int> shape) {
  Tensor out(shape);
  if (out.size() != a.value().size())
    throw std::invalid_argument("reshape: element count changed");
  out.arr() = a.value().arr();
  return a.tape->push("reshape", std::move(out), {a.id},
                      [](Tape::BackwardCtx& ctx) {
                        ctx.grad_in(0).arr() += ctx.grad_out().arr();
                      });
}

}  // namespace pclab
