#pragma once

#include "pclab/tape.hpp"

namespace pclab {

// Elementwise, same shape unless noted.
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);  // Hadamard
Var scale(Var a, float s);
Var relu(Var a);

/// {R,C} + {C}: adds the vector to every row.
Var add_rowvec(Var m, Var bias);

/// Rank-2 product {M,K}x{K,N} -> {M,N}.
Var matmul(Var a, Var b);

/// Column-wise max over rows, {N,C} -> {1,C}. Ties go to the lowest row;
/// the backward routes each column's gradient to that row only.
Var max_over_points(Var m);

/// Max over the middle axis, {N,K,C} -> {N,C}. Ties to the lowest k.
Var max_over_neighbors(Var t);

Var reduce_sum(Var a);   // all elements -> {1}
Var reduce_mean(Var a);  // all elements -> {1}

/// -log softmax(logits)[label], max-shifted. logits rank 1, size >= 2.
Var cross_entropy_logits(Var logits, int label);

/// Single element of a rank-1 tensor -> {1}.
Var pick(Var v, int index);

/// {N,C} gathered by an {N,K} index table -> {N,K,C}. Backward scatter-adds.
Var gather_rows(Var m, IdxMat idx);

/// Each row repeated k times, {N,C} -> {N,K,C}.
Var repeat_rows(Var m, int k);

/// Concat along the last axis; leading dims must match.
Var concat_channels(Var a, Var b);

/// Same element count, new shape. Free on row-major storage.
Var reshape(Var a, std::vector<int> shape);

}  // namespace pclab
