#include "lanet/model/config.hpp"

#include "lanet/error.hpp"

namespace lanet::model {

namespace {

constexpr std::pair<Variant, const char*> kVariants[] = {
    {Variant::lanet, "lanet"},
    {Variant::time_attention, "time_attention"},
    {Variant::concat_attention, "concat_attention"},
    {Variant::gated_attention, "gated_attention"},
    {Variant::transformer_base, "transformer_base"},
    {Variant::lstm, "lstm"},
};

}  // namespace

Variant parse_variant(const std::string& name) {
  for (const auto& [v, n] : kVariants) {
    if (name == n) return v;
  }
  throw ConfigError("unknown model variant '" + name + "'");
}

std::string variant_name(Variant v) {
  for (const auto& [x, n] : kVariants) {
    if (x == v) return n;
  }
  return "?";
}

embed::DimMode parse_dim_mode(const std::string& name) {
  if (name == "component") return embed::DimMode::component;
  if (name == "total") return embed::DimMode::total;
  throw ConfigError("unknown dim_mode '" + name + "' (expected component or total)");
}

std::string dim_mode_name(embed::DimMode m) {
  return m == embed::DimMode::component ? "component" : "total";
}

bool ModelConfig::has_label_branch() const {
  return variant == Variant::lanet || variant == Variant::concat_attention ||
         variant == Variant::gated_attention;
}

void ModelConfig::validate() const {
  if (tau < 1) throw ConfigError("tau must be >= 1");
  if (heads < 1) throw ConfigError("heads must be >= 1");
  const std::size_t D = model_dim();
  if (D % heads != 0) {
    throw ConfigError("model dimension " + std::to_string(D) + " is not divisible by " +
                      std::to_string(heads) + " heads");
  }
  if (variant != Variant::lstm && layers < 1) throw ConfigError("layers must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must lie in [0, 1)");
  const bool baseline = variant == Variant::transformer_base || variant == Variant::lstm;
  if (baseline && (drop.drop_amount || drop.drop_time || drop.drop_id)) {
    throw ConfigError("component drop-outs apply only to the label-embedding variants");
  }
  if (absence_indication && !has_label_branch()) {
    throw ConfigError("absence indication needs a label-attention branch");
  }
}

nlohmann::json to_json(const ModelConfig& c) {
  return {
      {"variant", variant_name(c.variant)},
      {"layers", c.layers},
      {"heads", c.heads},
      {"tau", c.tau},
      {"d_c", c.d_c},
      {"dim_mode", dim_mode_name(c.dim_mode)},
      {"dropout", c.dropout},
      {"absence_indication", c.absence_indication},
      {"drop_amount", c.drop.drop_amount},
      {"drop_time", c.drop.drop_time},
      {"drop_id", c.drop.drop_id},
  };
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.variant = parse_variant(j.at("variant").get<std::string>());
  c.layers = j.at("layers").get<std::size_t>();
  c.heads = j.at("heads").get<std::size_t>();
  c.tau = j.at("tau").get<std::size_t>();
  c.d_c = j.at("d_c").get<std::size_t>();
  c.dim_mode = parse_dim_mode(j.at("dim_mode").get<std::string>());
  c.dropout = j.at("dropout").get<double>();
  c.absence_indication = j.at("absence_indication").get<bool>();
  c.drop.drop_amount = j.at("drop_amount").get<bool>();
  c.drop.drop_time = j.at("drop_time").get<bool>();
  c.drop.drop_id = j.at("drop_id").get<bool>();
  c.validate();
  return c;
}

}  // namespace lanet::model
