#include "lanet/data/vocab.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "lanet/error.hpp"

namespace lanet::data {

Vocabularies::Vocabularies(std::vector<std::string> labels, std::vector<std::string> ids,
                           std::vector<int> dt_values, std::vector<double> amount_edges)
    : labels_(std::move(labels)),
      ids_(std::move(ids)),
      dt_values_(std::move(dt_values)),
      amount_edges_(std::move(amount_edges)) {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (!label_lookup_.emplace(labels_[i], i).second)
      throw ValidationError("duplicate label '" + labels_[i] + "' in vocabulary");
  }
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!id_lookup_.emplace(ids_[i], i + 1).second)
      throw ValidationError("duplicate ID '" + ids_[i] + "' in vocabulary");
  }
  for (std::size_t i = 1; i < dt_values_.size(); ++i) {
    if (dt_values_[i - 1] >= dt_values_[i]) throw ValidationError("dt values must be increasing");
  }
  for (std::size_t i = 1; i < amount_edges_.size(); ++i) {
    if (!(amount_edges_[i - 1] < amount_edges_[i]))
      throw ValidationError("amount bin edges must be strictly increasing");
  }
}

std::optional<std::size_t> Vocabularies::label_index(const std::string& label) const {
  auto it = label_lookup_.find(label);
  if (it == label_lookup_.end()) return std::nullopt;
  return it->second;
}

std::size_t Vocabularies::id_index(const std::string& id) const {
  auto it = id_lookup_.find(id);
  return it == id_lookup_.end() ? 0 : it->second;
}

std::size_t Vocabularies::dt_index(std::optional<int> gap) const {
  if (!gap) return 0;
  auto it = std::upper_bound(dt_values_.begin(), dt_values_.end(), *gap);
  return static_cast<std::size_t>(it - dt_values_.begin());
}

std::size_t Vocabularies::amount_bin(double amount) const {
  auto it = std::upper_bound(amount_edges_.begin(), amount_edges_.end(), amount);
  return static_cast<std::size_t>(it - amount_edges_.begin());
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw ValidationError("quantile of empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

Vocabularies fit_vocabularies(const std::vector<WindowSample>& train, std::size_t n_amount_bins) {
  if (train.empty()) throw ValidationError("cannot fit vocabularies on an empty training set");
  if (n_amount_bins == 0) throw ConfigError("n_amount_bins must be >= 1");
  for (const auto& s : train) {
    if (s.split != Split::train) {
      throw ValidationError("vocabularies may only be fitted on training samples");
    }
  }

  auto by_natural = [](const std::string& a, const std::string& b) { return natural_less(a, b); };
  std::set<std::string, decltype(by_natural)> labels(by_natural), ids(by_natural);
  std::set<int> dts;
  std::vector<double> amounts;
  for (const auto& s : train) {
    ids.insert(s.sequence_id);
    for (std::size_t p = 0; p < s.window.size(); ++p) {
      for (const auto& l : s.window[p].labels) labels.insert(l);
      amounts.insert(amounts.end(), s.window[p].amounts.begin(), s.window[p].amounts.end());
      if (s.dts[p]) dts.insert(*s.dts[p]);
    }
    for (const auto& l : s.target.labels) labels.insert(l);
  }

  std::sort(amounts.begin(), amounts.end());
  std::vector<double> edges;
  if (!amounts.empty()) {
    for (std::size_t i = 1; i < n_amount_bins; ++i) {
      double e = quantile_sorted(amounts, static_cast<double>(i) / static_cast<double>(n_amount_bins));
      if (e <= amounts.front()) continue;
      if (!edges.empty() && e <= edges.back()) continue;
      edges.push_back(e);
    }
  }
  return Vocabularies({labels.begin(), labels.end()}, {ids.begin(), ids.end()},
                      {dts.begin(), dts.end()}, std::move(edges));
}

}  // namespace lanet::data
