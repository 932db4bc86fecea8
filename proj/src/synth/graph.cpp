#include "lanet/synth/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include "lanet/error.hpp"

namespace lanet::synth {

double Edge::probability(double parent_amount) const {
  if (!amount_threshold) return p;
  return parent_amount >= *amount_threshold ? p : p_low;
}

namespace {

void check_probability(double p, const std::string& what) {
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(what + " must lie in [0, 1]");
}

void check_rates(const std::vector<double>& r, std::size_t K, const std::string& what) {
  if (r.size() != K) throw ConfigError(what + " needs " + std::to_string(K) + " entries");
  for (double p : r) check_probability(p, what);
}

}  // namespace

void PlantedGraph::validate() const {
  if (K < 2) throw ConfigError("planted graph needs K >= 2");
  check_rates(base_rates, K, "base_rates");
  if (!initial_rates.empty()) check_rates(initial_rates, K, "initial_rates");
  if (amount_laws.size() != K) throw ConfigError("amount_law needs " + std::to_string(K) + " entries");
  for (const auto& a : amount_laws) {
    if (!(a.sigma >= 0.0) || !std::isfinite(a.mu)) throw ConfigError("bad amount law");
  }
  if (!(dt_law.p > 0.0 && dt_law.p <= 1.0)) throw ConfigError("dt_law.p must lie in (0, 1]");
  for (const auto& e : edges) {
    if (e.parent >= K || e.child >= K) throw ConfigError("edge refers to a label outside 0..K-1");
    check_probability(e.p, "edge p");
    check_probability(e.p_low, "edge p_low");
  }
  auto all_zero = [](const std::vector<double>& r) {
    return std::all_of(r.begin(), r.end(), [](double p) { return p == 0.0; });
  };
  if (all_zero(first_rates())) {
    throw ConfigError("first events would be empty with probability 1");
  }
}

std::string label_name(std::size_t k) { return std::to_string(k); }

nlohmann::json to_json(const PlantedGraph& g) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : g.edges) {
    nlohmann::json j{{"parent", e.parent}, {"child", e.child}, {"p", e.p}};
    if (e.amount_threshold) {
      j["amount_threshold"] = *e.amount_threshold;
      j["p_low"] = e.p_low;
    }
    edges.push_back(j);
  }
  nlohmann::json laws = nlohmann::json::array();
  for (const auto& a : g.amount_laws) laws.push_back({{"mu", a.mu}, {"sigma", a.sigma}});
  nlohmann::json j{{"K", g.K},
                   {"edges", edges},
                   {"base_rates", g.base_rates},
                   {"amount_law", laws},
                   {"dt_law", {{"p", g.dt_law.p}}}};
  if (!g.initial_rates.empty()) j["initial_rates"] = g.initial_rates;
  return j;
}

namespace {

void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> known,
                    const std::string& where) {
  std::vector<std::string> bad;
  for (const auto& [key, v] : j.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
      bad.push_back(key);
    }
  }
  if (!bad.empty()) {
    std::string list;
    for (const auto& b : bad) list += (list.empty() ? "" : ", ") + b;
    throw ConfigError("unknown keys in " + where + ": " + list);
  }
}

std::vector<double> rates(const nlohmann::json& j, std::size_t K) {
  if (j.is_number()) return std::vector<double>(K, j.get<double>());
  return j.get<std::vector<double>>();
}

AmountLaw amount_law(const nlohmann::json& j) {
  reject_unknown(j, {"mu", "sigma"}, "amount_law");
  AmountLaw a;
  a.mu = j.value("mu", a.mu);
  a.sigma = j.value("sigma", a.sigma);
  return a;
}

}  // namespace

PlantedGraph graph_from_json(const nlohmann::json& j) {
  try {
    reject_unknown(j, {"K", "edges", "base_rates", "initial_rates", "amount_law", "dt_law"}, "graph");
    PlantedGraph g;
    g.K = j.at("K").get<std::size_t>();
    g.base_rates = rates(j.at("base_rates"), g.K);
    if (j.contains("initial_rates")) g.initial_rates = rates(j.at("initial_rates"), g.K);
    for (const auto& e : j.value("edges", nlohmann::json::array())) {
      reject_unknown(e, {"parent", "child", "p", "amount_threshold", "p_low"}, "edge");
      Edge edge;
      edge.parent = e.at("parent").get<std::size_t>();
      edge.child = e.at("child").get<std::size_t>();
      edge.p = e.at("p").get<double>();
      if (e.contains("amount_threshold")) {
        edge.amount_threshold = e.at("amount_threshold").get<double>();
        edge.p_low = e.at("p_low").get<double>();
      }
      g.edges.push_back(edge);
    }
    if (!j.contains("amount_law")) {
      g.amount_laws.assign(g.K, AmountLaw{});
    } else if (j.at("amount_law").is_object()) {
      g.amount_laws.assign(g.K, amount_law(j.at("amount_law")));
    } else {
      for (const auto& a : j.at("amount_law")) g.amount_laws.push_back(amount_law(a));
    }
    if (j.contains("dt_law")) {
      reject_unknown(j.at("dt_law"), {"p"}, "dt_law");
      g.dt_law.p = j.at("dt_law").value("p", g.dt_law.p);
    }
    g.validate();
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid graph JSON: ") + e.what());
  }
}

PlantedGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  try {
    return graph_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::vector<double> activation_probabilities(const PlantedGraph& g,
                                             const data::EventRecord* previous) {
  if (!previous) return g.first_rates();
  std::vector<double> off(g.K);
  for (std::size_t c = 0; c < g.K; ++c) off[c] = 1.0 - g.base_rates[c];
  // parent label index -> amount in the previous event
  std::vector<std::optional<double>> active(g.K);
  for (std::size_t i = 0; i < previous->labels.size(); ++i) {
    const std::size_t k = std::stoul(previous->labels[i]);
    if (k < g.K) active[k] = previous->amounts[i];
  }
  for (const auto& e : g.edges) {
    if (active[e.parent]) off[e.child] *= 1.0 - e.probability(*active[e.parent]);
  }
  for (auto& v : off) v = 1.0 - v;
  return off;
}

std::vector<double> bayes_optimal_scores(const PlantedGraph& g, const data::EventRecord* previous) {
  auto p = activation_probabilities(g, previous);
  double empty = 1.0;
  for (double v : p) empty *= 1.0 - v;
  if (empty >= 1.0) throw ValidationError("next event is empty with probability 1");
  for (auto& v : p) v /= 1.0 - empty;
  return p;
}

std::vector<data::EventRecord> generate(const PlantedGraph& g, std::size_t n_ids,
                                        std::size_t events_per_id, std::uint64_t seed) {
  g.validate();
  std::vector<data::EventRecord> out;
  out.reserve(n_ids * events_per_id);
  const data::Date origin{std::chrono::year{2020} / 1 / 1};
  for (std::size_t id = 0; id < n_ids; ++id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(id), static_cast<std::uint32_t>(id >> 32)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::geometric_distribution<int> gap(g.dt_law.p);
    data::Date date = origin + std::chrono::days{static_cast<int>(rng() % 30)};
    const data::EventRecord* previous = nullptr;
    for (std::size_t t = 0; t < events_per_id; ++t) {
      const auto p = activation_probabilities(g, previous);
      if (std::all_of(p.begin(), p.end(), [](double v) { return v == 0.0; })) {
        throw ValidationError("sequence " + std::to_string(id) + " reached a state whose next event is empty with probability 1");
      }
      data::EventRecord e;
      e.sequence_id = std::to_string(id);
      if (t > 0) date += std::chrono::days{1 + gap(rng)};
      e.date = date;
      while (e.labels.empty()) {
        for (std::size_t k = 0; k < g.K; ++k) {
          if (u(rng) < p[k]) e.labels.push_back(label_name(k));
        }
      }
      for (const auto& l : e.labels) {
        const auto& law = g.amount_laws[std::stoul(l)];
        e.amounts.push_back(std::exp(law.mu + law.sigma * normal(rng)));
      }
      out.push_back(std::move(e));
      previous = &out.back();
    }
  }
  return out;
}

PlantedGraph random_graph(std::size_t K, std::size_t parents_per_label, double p_edge,
                          double base_rate, std::uint64_t seed) {
  if (parents_per_label > K) throw ConfigError("more parents than labels");
  std::mt19937_64 rng(seed);
  PlantedGraph g;
  g.K = K;
  g.base_rates.assign(K, base_rate);
  g.amount_laws.assign(K, AmountLaw{});
  std::vector<std::size_t> labels(K);
  for (std::size_t k = 0; k < K; ++k) labels[k] = k;
  for (std::size_t c = 0; c < K; ++c) {
    std::shuffle(labels.begin(), labels.end(), rng);
    for (std::size_t i = 0; i < parents_per_label; ++i) g.edges.push_back({labels[i], c, p_edge});
  }
  g.validate();
  return g;
}

PlantedGraph chain_graph(std::size_t K, double base_rate, double initial_rate) {
  PlantedGraph g;
  g.K = K;
  g.base_rates.assign(K, base_rate);
  g.initial_rates.assign(K, initial_rate);
  g.amount_laws.assign(K, AmountLaw{});
  for (std::size_t k = 0; k < K; ++k) g.edges.push_back({k, (k + 1) % K, 1.0});
  g.validate();
  return g;
}

}  // namespace lanet::synth
