#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lanet/data/events.hpp"

namespace lanet::synth {

/// parent -> child activation. When `amount_threshold` is set, the edge fires
/// with `p` if the parent's amount is >= the threshold and `p_low` otherwise.
struct Edge {
  std::size_t parent = 0;
  std::size_t child = 0;
  double p = 1.0;
  std::optional<double> amount_threshold;
  double p_low = 0.0;

  double probability(double parent_amount) const;
};

/// Log-normal amounts: exp(mu + sigma * N(0, 1)).
struct AmountLaw {
  double mu = 0.0;
  double sigma = 0.5;
};

/// Day gaps 1 + Geometric(p) (failures before the first success).
struct DtLaw {
  double p = 0.3;
};

/// Labels are named by their 0-based index ("0", "1", ...).
struct PlantedGraph {
  std::size_t K = 0;
  std::vector<Edge> edges;
  std::vector<double> base_rates;
  std::vector<double> initial_rates;  // first event of a sequence; empty means base_rates
  std::vector<AmountLaw> amount_laws;
  DtLaw dt_law;

  /// Throws ConfigError on bad sizes or probabilities.
  void validate() const;
  const std::vector<double>& first_rates() const {
    return initial_rates.empty() ? base_rates : initial_rates;
  }
};

std::string label_name(std::size_t k);

nlohmann::json to_json(const PlantedGraph& g);
/// Accepts scalars for base_rates, initial_rates and amount_law as shorthand
/// for the same value on every label. Rejects unknown keys.
PlantedGraph graph_from_json(const nlohmann::json& j);
PlantedGraph load_graph(const std::string& path);

/// Unconditioned noisy-OR probabilities of each label given the previous
/// event (nullptr for the first event of a sequence):
/// 1 - (1 - base_c) * prod over active parent edges (1 - p_e).
std::vector<double> activation_probabilities(const PlantedGraph& g, const data::EventRecord* previous);

/// Exact next-event label marginals under the generator, which redraws
/// empty label sets: activation_c / (1 - prod_k (1 - activation_k)).
/// Throws ValidationError when every activation is zero.
std::vector<double> bayes_optimal_scores(const PlantedGraph& g, const data::EventRecord* previous);

/// Sequences "0" .. n_ids-1, each with `events_per_id` events. Deterministic
/// per seed; each ID draws from its own derived stream.
std::vector<data::EventRecord> generate(const PlantedGraph& g, std::size_t n_ids,
                                        std::size_t events_per_id, std::uint64_t seed);

/// Random noisy-OR graph: every label gets `parents_per_label` distinct
/// random parents with edge probability `p_edge`.
PlantedGraph random_graph(std::size_t K, std::size_t parents_per_label, double p_edge,
                          double base_rate, std::uint64_t seed);

/// Cycle 0 -> 1 -> ... -> K-1 -> 0 with p = 1.
PlantedGraph chain_graph(std::size_t K, double base_rate, double initial_rate);

}  // namespace lanet::synth
