#include "lanet/num/nn.hpp"

#include <cmath>

namespace lanet::num {

Linear make_linear(ParamSet& params, const std::string& name, std::size_t in, std::size_t out,
                   Rng& rng) {
  Linear layer;
  layer.weight = params.add(name + ".weight", fan_in_uniform_init(in, out, in, rng));
  layer.bias = params.add(name + ".bias", fan_in_uniform_init(1, out, in, rng));
  return layer;
}

Tensor linear(const Tensor& x, const Linear& layer) {
  return add_row(matmul(x, layer.weight), layer.bias);
}

AttentionResult scaled_dot_attention(const Tensor& q, const Tensor& k, const Tensor& v) {
  const std::size_t d = q.cols();
  if (d == 0) throw DimensionError("scaled_dot_attention: head dimension is 0");
  if (k.cols() != d || v.cols() != d || k.rows() != v.rows()) {
    throw DimensionError("scaled_dot_attention: q " + shape_str(q.shape()) + ", k " +
                         shape_str(k.shape()) + ", v " + shape_str(v.shape()));
  }
  Tensor logits = scale(matmul(q, transpose(k)), 1.0 / std::sqrt(static_cast<double>(d)));
  Tensor weights = softmax_rows(logits);
  return {matmul(weights, v), weights};
}

MultiheadParams make_multihead(ParamSet& params, const std::string& prefix, std::size_t model_dim,
                               std::size_t heads, Rng& rng) {
  if (heads == 0 || model_dim == 0 || model_dim % heads != 0) {
    throw ConfigError("model dimension " + std::to_string(model_dim) +
                      " is not divisible by head count " + std::to_string(heads));
  }
  const std::size_t head_dim = model_dim / heads;
  MultiheadParams mh;
  for (std::size_t h = 0; h < heads; ++h) {
    const std::string p = prefix + ".head" + std::to_string(h);
    AttentionHead head;
    head.query = make_linear(params, p + ".query", model_dim, head_dim, rng);
    head.key = make_linear(params, p + ".key", model_dim, head_dim, rng);
    head.value = make_linear(params, p + ".value", model_dim, head_dim, rng);
    mh.heads.push_back(std::move(head));
  }
  mh.output = make_linear(params, prefix + ".output", model_dim, model_dim, rng);
  return mh;
}

MultiheadResult multihead_attention(const Tensor& x, const MultiheadParams& params) {
  const std::size_t heads = params.heads.size();
  const std::size_t D = x.cols();
  if (heads == 0 || D % heads != 0) {
    throw ConfigError("multihead_attention: dimension " + std::to_string(D) +
                      " not divisible by " + std::to_string(heads) + " heads");
  }
  if (params.model_dim() != D) {
    throw DimensionError("multihead_attention: input " + shape_str(x.shape()) +
                         " vs model dimension " + std::to_string(params.model_dim()));
  }
  const std::size_t T = x.rows();
  std::vector<Tensor> outs;
  std::vector<double> weights;
  weights.reserve(heads * T * T);
  for (const auto& head : params.heads) {
    auto r = scaled_dot_attention(linear(x, head.query), linear(x, head.key), linear(x, head.value));
    outs.push_back(r.out);
    weights.insert(weights.end(), r.weights.data().begin(), r.weights.data().end());
  }
  Tensor merged = heads == 1 ? outs[0] : concat_cols(outs);
  return {linear(merged, params.output), Tensor({heads, T, T}, std::move(weights))};
}

LayerNormParams make_layer_norm(ParamSet& params, const std::string& prefix, std::size_t dim) {
  return {params.add(prefix + ".gain", Tensor::full({1, dim}, 1.0)),
          params.add(prefix + ".bias", Tensor::zeros({1, dim}))};
}

EncoderLayerParams make_encoder_layer(ParamSet& params, const std::string& prefix,
                                      std::size_t model_dim, std::size_t heads,
                                      std::size_t ff_dim, Rng& rng) {
  EncoderLayerParams p;
  p.attention = make_multihead(params, prefix + ".attn", model_dim, heads, rng);
  p.norm1 = make_layer_norm(params, prefix + ".norm1", model_dim);
  p.ff_in = make_linear(params, prefix + ".ff_in", model_dim, ff_dim, rng);
  p.ff_out = make_linear(params, prefix + ".ff_out", ff_dim, model_dim, rng);
  p.norm2 = make_layer_norm(params, prefix + ".norm2", model_dim);
  return p;
}

EncoderLayerResult encoder_layer(const Tensor& x, const EncoderLayerParams& params,
                                 double dropout_p, Mode mode, Rng& rng) {
  auto attn = multihead_attention(x, params.attention);
  Tensor h = layer_norm(add(x, dropout(attn.out, dropout_p, mode, rng)), params.norm1.gain,
                        params.norm1.bias);
  Tensor ff = linear(relu(linear(h, params.ff_in)), params.ff_out);
  Tensor out =
      layer_norm(add(h, dropout(ff, dropout_p, mode, rng)), params.norm2.gain, params.norm2.bias);
  return {out, attn.weights};
}

LstmParams make_lstm(ParamSet& params, const std::string& prefix, std::size_t in,
                     std::size_t hidden, Rng& rng) {
  LstmParams p;
  p.input = make_linear(params, prefix + ".input", in, 4 * hidden, rng);
  p.recurrent =
      params.add(prefix + ".recurrent", fan_in_uniform_init(hidden, 4 * hidden, hidden, rng));
  return p;
}

LstmState lstm_cell(const Tensor& x, const LstmState& prev, const LstmParams& params) {
  const std::size_t H = params.hidden();
  if (prev.h.cols() != H || prev.c.cols() != H || params.input.out_features() != 4 * H) {
    throw DimensionError("lstm_cell: hidden size mismatch, h " + shape_str(prev.h.shape()) +
                         ", c " + shape_str(prev.c.shape()) + ", H " + std::to_string(H));
  }
  Tensor gates = add(linear(x, params.input), matmul(prev.h, params.recurrent));
  Tensor i = sigmoid(slice_cols(gates, 0, H));
  Tensor f = sigmoid(slice_cols(gates, H, 2 * H));
  Tensor g = tanh(slice_cols(gates, 2 * H, 3 * H));
  Tensor o = sigmoid(slice_cols(gates, 3 * H, 4 * H));
  Tensor c = add(mul(f, prev.c), mul(i, g));
  Tensor h = mul(o, tanh(c));
  return {h, c};
}

}  // namespace lanet::num
