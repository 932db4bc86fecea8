#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "lanet/num/ops.hpp"
#include "lanet/num/params.hpp"

namespace lanet::num {

/// x[T x in] * weight[in x out] + bias[out].
struct Linear {
  Tensor weight;
  Tensor bias;

  std::size_t in_features() const { return weight.rows(); }
  std::size_t out_features() const { return weight.cols(); }
};

Linear make_linear(ParamSet& params, const std::string& name, std::size_t in, std::size_t out,
                   Rng& rng);
Tensor linear(const Tensor& x, const Linear& layer);

struct AttentionResult {
  Tensor out;      // T x d_h
  Tensor weights;  // T x T, row-stochastic
};

/// softmax(q k^T / sqrt(d_h)) v.
AttentionResult scaled_dot_attention(const Tensor& q, const Tensor& k, const Tensor& v);

struct AttentionHead {
  Linear query;
  Linear key;
  Linear value;
};

struct MultiheadParams {
  std::vector<AttentionHead> heads;
  Linear output;

  std::size_t model_dim() const { return output.out_features(); }
};

/// Throws ConfigError unless `model_dim` is a positive multiple of `heads`.
MultiheadParams make_multihead(ParamSet& params, const std::string& prefix, std::size_t model_dim,
                               std::size_t heads, Rng& rng);

struct MultiheadResult {
  Tensor out;      // T x D
  Tensor weights;  // heads x T x T, detached copy
};

MultiheadResult multihead_attention(const Tensor& x, const MultiheadParams& params);

struct LayerNormParams {
  Tensor gain;
  Tensor bias;
};

LayerNormParams make_layer_norm(ParamSet& params, const std::string& prefix, std::size_t dim);

/// Post-norm transformer encoder layer: attention, residual, norm, ReLU
/// feed-forward, residual, norm. Dropout sits after the attention block and
/// after the feed-forward block.
struct EncoderLayerParams {
  MultiheadParams attention;
  LayerNormParams norm1;
  Linear ff_in;
  Linear ff_out;
  LayerNormParams norm2;
};

EncoderLayerParams make_encoder_layer(ParamSet& params, const std::string& prefix,
                                      std::size_t model_dim, std::size_t heads,
                                      std::size_t ff_dim, Rng& rng);

struct EncoderLayerResult {
  Tensor out;
  Tensor attention;  // heads x T x T
};

EncoderLayerResult encoder_layer(const Tensor& x, const EncoderLayerParams& params,
                                 double dropout_p, Mode mode, Rng& rng);

/// Gate order in the fused matrices is input, forget, cell candidate, output.
struct LstmParams {
  Linear input;      // in x 4H, with bias
  Tensor recurrent;  // H x 4H

  std::size_t hidden() const { return recurrent.rows(); }
};

struct LstmState {
  Tensor h;  // 1 x H
  Tensor c;  // 1 x H
};

LstmParams make_lstm(ParamSet& params, const std::string& prefix, std::size_t in,
                     std::size_t hidden, Rng& rng);
LstmState lstm_cell(const Tensor& x, const LstmState& prev, const LstmParams& params);

}  // namespace lanet::num
