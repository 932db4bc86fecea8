#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "lanet/model/model.hpp"

namespace lanet::model {

/// Square token-to-token attention map; rows are queries, columns keys.
struct AttentionMap {
  std::vector<std::string> names;  // "ID" (unless dropped) then label names
  std::vector<double> weights;     // names.size()^2, row-major

  std::size_t size() const { return names.size(); }
  double operator()(std::size_t q, std::size_t k) const { return weights[q * names.size() + k]; }
};

/// Label-attention weights averaged over heads, layers and samples, in eval
/// mode. Throws ValidationError on an empty sample list and ConfigError for
/// variants without label attention.
AttentionMap export_attention(const Model& model, const std::vector<data::EncodedSample>& samples);

void write_attention_csv(std::ostream& out, const AttentionMap& map);
void write_attention_csv_file(const std::filesystem::path& path, const AttentionMap& map);

}  // namespace lanet::model
