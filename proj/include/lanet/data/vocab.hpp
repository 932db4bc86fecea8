#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "lanet/data/windows.hpp"

namespace lanet::data {

/// Index maps fitted on the training split only.
///
/// Reserved indices: ID index 0 is the unknown ID; dt index 0 stands for
/// "no predecessor" and for gaps smaller than every observed one. Amount
/// bins are the intervals between `amount_edges`; bin b holds values with
/// exactly b edges at or below them.
class Vocabularies {
 public:
  Vocabularies() = default;
  Vocabularies(std::vector<std::string> labels, std::vector<std::string> ids,
               std::vector<int> dt_values, std::vector<double> amount_edges);

  std::size_t label_count() const { return labels_.size(); }
  std::size_t id_count() const { return ids_.size() + 1; }
  std::size_t dt_count() const { return dt_values_.size() + 1; }
  std::size_t bin_count() const { return amount_edges_.size() + 1; }

  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::vector<int>& dt_values() const { return dt_values_; }
  const std::vector<double>& amount_edges() const { return amount_edges_; }

  /// Label index, or nothing for a label never seen in training.
  std::optional<std::size_t> label_index(const std::string& label) const;
  /// ID index; unseen IDs map to 0.
  std::size_t id_index(const std::string& id) const;
  /// Index of the largest observed gap <= `gap`; 0 if none or no gap.
  std::size_t dt_index(std::optional<int> gap) const;
  /// Bin of an amount; values outside the fitted range clamp to an end bin.
  std::size_t amount_bin(double amount) const;

 private:
  std::vector<std::string> labels_;
  std::vector<std::string> ids_;
  std::vector<int> dt_values_;
  std::vector<double> amount_edges_;
  std::unordered_map<std::string, std::size_t> label_lookup_;
  std::unordered_map<std::string, std::size_t> id_lookup_;
};

/// Builds vocabularies from training samples (window and target events).
/// Amount edges are the i / n_amount_bins empirical quantiles (linear
/// interpolation) of training window amounts, with duplicates and edges at
/// the minimum removed. Throws ValidationError on an empty training set.
Vocabularies fit_vocabularies(const std::vector<WindowSample>& train, std::size_t n_amount_bins);

/// Linear-interpolation quantile of sorted values, q in [0, 1].
double quantile_sorted(const std::vector<double>& sorted, double q);

}  // namespace lanet::data
