#include "lanet/model/model.hpp"

#include <cmath>

#include "lanet/error.hpp"

namespace lanet::model {

using num::Mode;
using num::Rng;

std::vector<std::vector<double>> dense_amounts(const data::EncodedSample& s,
                                               std::size_t label_count) {
  std::vector<std::vector<double>> rows(s.tau, std::vector<double>(label_count, 0.0));
  for (const auto& o : s.occurrences) rows[o.position][o.label] = o.amount;
  return rows;
}

std::vector<double> AmountNormalizer::apply(const std::vector<double>& dense) const {
  std::vector<double> out(dense.size());
  for (std::size_t k = 0; k < dense.size(); ++k) out[k] = (dense[k] - mean[k]) / stddev[k];
  return out;
}

AmountNormalizer fit_amount_normalizer(const std::vector<data::EncodedSample>& train,
                                       std::size_t label_count) {
  AmountNormalizer n{std::vector<double>(label_count, 0.0), std::vector<double>(label_count, 1.0)};
  std::vector<double> sum(label_count, 0.0), sq(label_count, 0.0);
  std::size_t rows = 0;
  for (const auto& s : train) {
    for (const auto& r : dense_amounts(s, label_count)) {
      for (std::size_t k = 0; k < label_count; ++k) {
        sum[k] += r[k];
        sq[k] += r[k] * r[k];
      }
      ++rows;
    }
  }
  if (rows == 0) return n;
  const double m = static_cast<double>(rows);
  for (std::size_t k = 0; k < label_count; ++k) {
    n.mean[k] = sum[k] / m;
    const double var = std::max(0.0, sq[k] / m - n.mean[k] * n.mean[k]);
    // constant coordinates are only centred
    n.stddev[k] = var > 1e-24 ? std::sqrt(var) : 1.0;
  }
  return n;
}

Model::Model(ModelConfig config, data::Vocabularies vocab, AmountNormalizer normalizer,
             std::uint64_t init_seed)
    : config_(std::move(config)), vocab_(std::move(vocab)), normalizer_(std::move(normalizer)) {
  config_.validate();
  const std::size_t K = vocab_.label_count();
  if (K == 0) throw ConfigError("model needs at least one label");
  if (normalizer_.mean.size() != K || normalizer_.stddev.size() != K) {
    throw DimensionError("amount normalizer does not match the label vocabulary");
  }
  Rng rng(init_seed);
  const std::size_t D = config_.model_dim();
  switch (config_.variant) {
    case Variant::lanet:
    case Variant::time_attention:
    case Variant::concat_attention:
    case Variant::gated_attention: {
      tables_ = embed::make_tables(params_, "emb.", embed::TableSizes::from_vocab(vocab_, config_.tau),
                                   config_.widths(), config_.absence_indication, rng);
      encoder_ = make_encoder("enc", rng);
      if (config_.variant == Variant::lanet) {
        head_ = num::make_linear(params_, "head", D, 1, rng);
      } else if (config_.variant == Variant::time_attention) {
        head_ = num::make_linear(params_, "head", D, K, rng);
      } else {
        time_encoder_ = make_encoder("time_enc", rng);
        const bool concat = config_.variant == Variant::concat_attention;
        head_ = num::make_linear(params_, "head", concat ? 2 * D : D, 1, rng);
        if (!concat) gate_ = params_.add("gate", Tensor::zeros({1, 1}));
      }
      break;
    }
    case Variant::transformer_base:
    case Variant::lstm: {
      amount_proj_ = num::make_linear(params_, "amount_proj", K, D, rng);
      dt_table_ = params_.add("dt", num::normal_init(vocab_.dt_count(), D, rng));
      position_table_ = params_.add("position", num::normal_init(config_.tau, D, rng));
      id_table_ = params_.add("id", num::normal_init(vocab_.id_count(), D, rng));
      if (config_.variant == Variant::transformer_base) {
        encoder_ = make_encoder("enc", rng);
      } else {
        lstm_ = num::make_lstm(params_, "lstm", D, D, rng);
      }
      head_ = num::make_linear(params_, "head", D, K, rng);
      break;
    }
  }
}

Model::Encoder Model::make_encoder(const std::string& prefix, Rng& rng) {
  Encoder e;
  const std::size_t D = config_.model_dim();
  for (std::size_t l = 0; l < config_.layers; ++l) {
    e.layers.push_back(
        num::make_encoder_layer(params_, prefix + std::to_string(l), D, config_.heads, 4 * D, rng));
  }
  return e;
}

Tensor Model::run_encoder(const Encoder& enc, Tensor x, Mode mode, Rng& rng,
                          std::vector<Tensor>* attention) const {
  for (const auto& layer : enc.layers) {
    auto r = num::encoder_layer(x, layer, config_.dropout, mode, rng);
    x = r.out;
    if (attention) attention->push_back(r.attention);
  }
  return x;
}

ForwardResult Model::forward(const data::EncodedSample& s, Mode mode, Rng& rng) const {
  if (s.target.size() != label_count()) {
    throw DimensionError("sample has " + std::to_string(s.target.size()) + " labels, model has " +
                         std::to_string(label_count()));
  }
  if (s.tau != config_.tau) {
    throw DimensionError("sample window " + std::to_string(s.tau) + " differs from model tau " +
                         std::to_string(config_.tau));
  }
  switch (config_.variant) {
    case Variant::lanet: return forward_lanet(s, mode, rng);
    case Variant::time_attention: return forward_time(s, mode, rng);
    case Variant::concat_attention:
    case Variant::gated_attention: return forward_mixed(s, mode, rng);
    case Variant::transformer_base: return forward_transformer_base(s, mode, rng);
    case Variant::lstm: return forward_lstm(s, mode, rng);
  }
  throw ConfigError("unknown variant");
}

std::vector<double> Model::scores(const data::EncodedSample& s) const {
  num::NoGradGuard guard;
  Rng unused(0);
  Tensor p = num::sigmoid(forward(s, Mode::eval, unused).logits);
  return {p.data().begin(), p.data().end()};
}

ForwardResult Model::forward_lanet(const data::EncodedSample& s, Mode mode, Rng& rng) const {
  const std::size_t K = label_count();
  ForwardResult r;
  Tensor h = run_encoder(encoder_, embed::assemble_tokens(s, tables_, config_.drop), mode, rng,
                         &r.attention);
  const std::size_t off = config_.drop.id_rows();
  r.head_input = num::dropout(num::slice_rows(h, off, off + K), config_.dropout, mode, rng);
  r.logits = num::reshape(num::linear(r.head_input, head_), {1, K});
  return r;
}

ForwardResult Model::forward_time(const data::EncodedSample& s, Mode mode, Rng& rng) const {
  ForwardResult r;
  Tensor h = run_encoder(encoder_, embed::assemble_time_tokens(s, tables_, config_.drop), mode, rng,
                         &r.attention);
  r.head_input = num::dropout(num::mean_rows(h), config_.dropout, mode, rng);
  r.logits = num::linear(r.head_input, head_);
  return r;
}

ForwardResult Model::forward_mixed(const data::EncodedSample& s, Mode mode, Rng& rng) const {
  const std::size_t K = label_count();
  ForwardResult r;
  Tensor h = run_encoder(encoder_, embed::assemble_tokens(s, tables_, config_.drop), mode, rng,
                         &r.attention);
  const std::size_t off = config_.drop.id_rows();
  r.label_branch = num::slice_rows(h, off, off + K);
  Tensor t = run_encoder(time_encoder_, embed::assemble_time_tokens(s, tables_, config_.drop),
                         mode, rng, nullptr);
  r.time_branch = num::broadcast_rows(num::mean_rows(t), K);

  Tensor mixed;
  if (config_.variant == Variant::concat_attention) {
    mixed = num::concat_cols({r.label_branch, r.time_branch});
  } else {
    Tensor g = gate_override_ ? Tensor::full({1, 1}, *gate_override_) : num::sigmoid(gate_);
    Tensor one_minus = num::sub(Tensor::full({1, 1}, 1.0), g);
    mixed = num::add(num::scale_by(r.label_branch, g), num::scale_by(r.time_branch, one_minus));
  }
  r.head_input = num::dropout(mixed, config_.dropout, mode, rng);
  r.logits = num::reshape(num::linear(r.head_input, head_), {1, K});
  return r;
}

Tensor Model::baseline_inputs(const data::EncodedSample& s) const {
  const std::size_t K = label_count();
  const std::size_t T = s.tau;
  std::vector<double> flat;
  flat.reserve(T * K);
  for (const auto& row : dense_amounts(s, K)) {
    auto z = normalizer_.apply(row);
    flat.insert(flat.end(), z.begin(), z.end());
  }
  std::vector<std::pair<std::size_t, std::size_t>> dts, positions;
  for (std::size_t p = 0; p < T; ++p) {
    dts.emplace_back(p, s.dt_per_position[p]);
    positions.emplace_back(p, p);
  }
  Tensor x = num::linear(Tensor::matrix(T, K, std::move(flat)), amount_proj_);
  return num::add(x, num::add(num::embedding_bag(dt_table_, T, dts),
                              num::embedding_bag(position_table_, T, positions)));
}

ForwardResult Model::forward_transformer_base(const data::EncodedSample& s, Mode mode,
                                              Rng& rng) const {
  ForwardResult r;
  Tensor x = num::concat_rows({baseline_inputs(s), num::embedding_bag(id_table_, 1, {{0, s.id}})});
  Tensor h = run_encoder(encoder_, x, mode, rng, &r.attention);
  r.head_input = num::dropout(num::mean_rows(h), config_.dropout, mode, rng);
  r.logits = num::linear(r.head_input, head_);
  return r;
}

ForwardResult Model::forward_lstm(const data::EncodedSample& s, Mode mode, Rng& rng) const {
  ForwardResult r;
  const std::size_t T = s.tau;
  const std::size_t D = config_.model_dim();
  Tensor x = num::add_row(baseline_inputs(s), num::embedding_bag(id_table_, 1, {{0, s.id}}));
  num::LstmState state{Tensor::zeros({1, D}), Tensor::zeros({1, D})};
  for (std::size_t p = 0; p < T; ++p) state = num::lstm_cell(num::slice_rows(x, p, p + 1), state, lstm_);
  r.head_input = num::dropout(state.h, config_.dropout, mode, rng);
  r.logits = num::linear(r.head_input, head_);
  return r;
}

std::vector<double> frequency_scores(const std::vector<data::EncodedSample>& train,
                                     std::size_t label_count) {
  std::vector<double> f(label_count, 0.0);
  if (train.empty()) return f;
  for (const auto& s : train) {
    for (std::size_t k = 0; k < label_count; ++k) f[k] += s.target[k];
  }
  for (auto& v : f) v /= static_cast<double>(train.size());
  return f;
}

}  // namespace lanet::model
