#pragma once

// Small random vocabularies, samples and models for model-level tests.

#include <random>
#include <string>
#include <vector>

#include "lanet/data/encode.hpp"
#include "lanet/model/model.hpp"
#include "lanet/num/ops.hpp"

namespace lanet::testing {

inline data::Vocabularies toy_vocab(std::size_t K, std::size_t ids = 3, std::size_t dts = 4,
                                    std::size_t edges = 3) {
  std::vector<std::string> labels, names;
  for (std::size_t k = 0; k < K; ++k) labels.push_back("L" + std::to_string(k));
  for (std::size_t i = 0; i < ids; ++i) names.push_back("u" + std::to_string(i));
  std::vector<int> dt;
  for (std::size_t i = 0; i < dts; ++i) dt.push_back(static_cast<int>(2 * i + 1));
  std::vector<double> e;
  for (std::size_t i = 0; i < edges; ++i) e.push_back(0.5 * static_cast<double>(i + 1));
  return data::Vocabularies(labels, names, dt, e);
}

/// Random window over `vocab`: each (label, position) present with
/// probability `density`, amounts uniform on [0, 2.5).
inline data::EncodedSample random_sample(const data::Vocabularies& vocab, std::size_t tau,
                                         std::mt19937_64& rng, double density = 0.4) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  data::EncodedSample s;
  s.id = rng() % vocab.id_count();
  s.tau = tau;
  for (std::size_t p = 0; p < tau; ++p) s.dt_per_position.push_back(rng() % vocab.dt_count());
  const std::size_t K = vocab.label_count();
  for (std::size_t p = 0; p < tau; ++p) {
    for (std::size_t k = 0; k < K; ++k) {
      if (u(rng) >= density) continue;
      const double a = 2.5 * u(rng);
      s.occurrences.push_back({k, p, s.dt_per_position[p], vocab.amount_bin(a), a});
    }
  }
  s.target.assign(K, 0.0);
  for (auto& t : s.target) t = u(rng) < 0.5 ? 1.0 : 0.0;
  s.target[rng() % K] = 1.0;
  return s;
}

inline model::AmountNormalizer random_normalizer(std::size_t K, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.2, 1.5);
  model::AmountNormalizer n;
  for (std::size_t k = 0; k < K; ++k) {
    n.mean.push_back(u(rng) - 0.2);
    n.stddev.push_back(u(rng));
  }
  return n;
}

inline model::AmountNormalizer identity_normalizer(std::size_t K) {
  return {std::vector<double>(K, 0.0), std::vector<double>(K, 1.0)};
}

inline model::ModelConfig small_config(model::Variant v, std::size_t tau = 3, std::size_t d_c = 4,
                                       std::size_t heads = 2, std::size_t layers = 2) {
  model::ModelConfig c;
  c.variant = v;
  c.tau = tau;
  c.d_c = d_c;
  c.heads = heads;
  c.layers = layers;
  return c;
}

inline const std::vector<model::Variant>& all_variants() {
  static const std::vector<model::Variant> v{
      model::Variant::lanet,          model::Variant::time_attention,
      model::Variant::concat_attention, model::Variant::gated_attention,
      model::Variant::transformer_base, model::Variant::lstm};
  return v;
}

inline num::Tensor sample_loss(const model::Model& m, const data::EncodedSample& s) {
  num::Rng unused(0);
  auto r = m.forward(s, num::Mode::eval, unused);
  return num::bce_with_logits(r.logits, num::Tensor({1, s.target.size()}, s.target));
}

inline std::vector<num::Tensor> param_tensors(model::Model& m) {
  std::vector<num::Tensor> out;
  for (auto& e : m.params().entries()) out.push_back(e.tensor);
  return out;
}

}  // namespace lanet::testing
