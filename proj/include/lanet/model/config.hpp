#pragma once

#include <cstddef>
#include <string>

#include "json.hpp"
#include "lanet/embed/tokens.hpp"

namespace lanet::model {

enum class Variant {
  lanet,
  time_attention,
  concat_attention,
  gated_attention,
  transformer_base,
  lstm,
};

Variant parse_variant(const std::string& name);
std::string variant_name(Variant v);
embed::DimMode parse_dim_mode(const std::string& name);
std::string dim_mode_name(embed::DimMode m);

struct ModelConfig {
  Variant variant = Variant::lanet;
  std::size_t layers = 2;
  std::size_t heads = 4;
  std::size_t tau = 3;
  std::size_t d_c = 128;
  embed::DimMode dim_mode = embed::DimMode::component;
  double dropout = 0.3;
  bool absence_indication = false;
  embed::AssemblyFlags drop;

  embed::BlockWidths widths() const { return embed::block_widths(d_c, dim_mode); }
  std::size_t model_dim() const { return widths().total(); }
  /// Whether the variant has a label-attention branch.
  bool has_label_branch() const;
  /// Throws ConfigError on inconsistent settings.
  void validate() const;
};

nlohmann::json to_json(const ModelConfig& c);
ModelConfig model_config_from_json(const nlohmann::json& j);

}  // namespace lanet::model
