#pragma once

#include <cstddef>
#include <random>
#include <utility>
#include <vector>

#include "lanet/num/tensor.hpp"

namespace lanet::num {

using Rng = std::mt19937_64;

enum class Mode { train, eval };

// Every op below is differentiable in all tensor arguments unless noted.
// Matrices are row-major; a 1-D tensor of length n behaves as a 1 x n row.

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);
Tensor reshape(const Tensor& a, Shape shape);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);
/// Multiplies every element of `a` by the single value held in `s`.
Tensor scale_by(const Tensor& a, const Tensor& s);

/// a[m x n] + row[n], broadcast over rows.
Tensor add_row(const Tensor& a, const Tensor& row);
/// a[m x n] * row[n], broadcast over rows.
Tensor mul_row(const Tensor& a, const Tensor& row);
/// Repeats a single row `count` times.
Tensor broadcast_rows(const Tensor& row, std::size_t count);

Tensor relu(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor tanh(const Tensor& a);

/// Row-wise softmax with max subtraction. Throws NumericError on NaN/inf input.
Tensor softmax_rows(const Tensor& x);

/// Per-row normalization to zero mean and unit variance (biased variance,
/// epsilon inside the square root), followed by gain and bias.
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps = 1e-5);

/// Inverted dropout. Identity in eval mode or when p == 0.
Tensor dropout(const Tensor& x, double p, Mode mode, Rng& rng);

/// Mean over elements of the numerically stable binary cross-entropy on
/// logits. `targets` is not differentiated and must be 0/1.
Tensor bce_with_logits(const Tensor& logits, const Tensor& targets);

Tensor concat_cols(const std::vector<Tensor>& parts);
Tensor concat_rows(const std::vector<Tensor>& parts);
Tensor slice_cols(const Tensor& a, std::size_t begin, std::size_t end);
Tensor slice_rows(const Tensor& a, std::size_t begin, std::size_t end);

/// Column means, shape 1 x n.
Tensor mean_rows(const Tensor& a);
Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);

/// Sum-of-rows lookup. Output row r is the sum of table rows `i` over all
/// pairs (r, i); rows with no pair stay zero.
Tensor embedding_bag(const Tensor& table, std::size_t out_rows,
                     const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

}  // namespace lanet::num
