#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lanet/data/encode.hpp"
#include "lanet/embed/tokens.hpp"
#include "lanet/model/config.hpp"
#include "lanet/num/nn.hpp"

namespace lanet::model {

using num::Tensor;

/// Per-label mean and standard deviation of the dense amount vectors
/// (raw amounts at label positions, zero elsewhere) over training timestamps.
struct AmountNormalizer {
  std::vector<double> mean;
  std::vector<double> stddev;

  std::vector<double> apply(const std::vector<double>& dense) const;
};

AmountNormalizer fit_amount_normalizer(const std::vector<data::EncodedSample>& train,
                                       std::size_t label_count);

/// tau x K raw amount matrix of a sample, one row per window position.
std::vector<std::vector<double>> dense_amounts(const data::EncodedSample& sample,
                                               std::size_t label_count);

struct ForwardResult {
  Tensor logits;                 // 1 x K
  Tensor head_input;             // rows fed to the prediction layer
  std::vector<Tensor> attention;  // per layer, heads x T x T (label branch when present)
  Tensor label_branch;           // K x D, concat/gated only
  Tensor time_branch;            // K x D, concat/gated only
};

class Model {
 public:
  Model(ModelConfig config, data::Vocabularies vocab, AmountNormalizer normalizer,
        std::uint64_t init_seed);

  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;
  Model(Model&&) = default;
  Model& operator=(Model&&) = default;

  ForwardResult forward(const data::EncodedSample& sample, num::Mode mode, num::Rng& rng) const;
  /// Eval-mode sigmoid scores, without recording a graph.
  std::vector<double> scores(const data::EncodedSample& sample) const;

  const ModelConfig& config() const { return config_; }
  const data::Vocabularies& vocab() const { return vocab_; }
  const AmountNormalizer& normalizer() const { return normalizer_; }
  std::size_t label_count() const { return vocab_.label_count(); }
  num::ParamSet& params() { return params_; }
  const num::ParamSet& params() const { return params_; }

  /// Fixes the gated variant's mixing weight; nullopt restores the learned gate.
  void set_gate_override(std::optional<double> g) { gate_override_ = g; }

 private:
  struct Encoder {
    std::vector<num::EncoderLayerParams> layers;
  };
  Encoder make_encoder(const std::string& prefix, num::Rng& rng);
  Tensor run_encoder(const Encoder& enc, Tensor x, num::Mode mode, num::Rng& rng,
                     std::vector<Tensor>* attention) const;
  Tensor baseline_inputs(const data::EncodedSample& s) const;

  ForwardResult forward_lanet(const data::EncodedSample& s, num::Mode mode, num::Rng& rng) const;
  ForwardResult forward_time(const data::EncodedSample& s, num::Mode mode, num::Rng& rng) const;
  ForwardResult forward_mixed(const data::EncodedSample& s, num::Mode mode, num::Rng& rng) const;
  ForwardResult forward_transformer_base(const data::EncodedSample& s, num::Mode mode,
                                         num::Rng& rng) const;
  ForwardResult forward_lstm(const data::EncodedSample& s, num::Mode mode, num::Rng& rng) const;

  ModelConfig config_;
  data::Vocabularies vocab_;
  AmountNormalizer normalizer_;
  num::ParamSet params_;
  std::optional<double> gate_override_;

  embed::EmbeddingTables tables_;
  Encoder encoder_;
  Encoder time_encoder_;
  num::Linear head_;
  Tensor gate_;
  // baselines
  num::Linear amount_proj_;
  Tensor dt_table_;
  Tensor position_table_;
  Tensor id_table_;
  num::LstmParams lstm_;
};

/// Per-label share of positive targets among training samples.
std::vector<double> frequency_scores(const std::vector<data::EncodedSample>& train,
                                     std::size_t label_count);

}  // namespace lanet::model
