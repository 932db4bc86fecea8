#pragma once

#include <filesystem>
#include <iosfwd>

#include "json.hpp"
#include "lanet/model/model.hpp"

namespace lanet::model {

nlohmann::json to_json(const data::Vocabularies& vocab);
data::Vocabularies vocab_from_json(const nlohmann::json& j);

/// Binary layout: 8-byte magic, u32 version, u64 metadata length, UTF-8
/// JSON metadata (config, vocabularies, normalizer, tensor index), then every
/// parameter as little-endian float64 in index order.
void save_checkpoint(std::ostream& out, const Model& model);
void save_checkpoint(const std::filesystem::path& path, const Model& model);
Model load_checkpoint(std::istream& in);
Model load_checkpoint(const std::filesystem::path& path);

}  // namespace lanet::model
