#include "lanet/model/checkpoint.hpp"

#include <bit>
#include <algorithm>
#include <cstring>
#include <fstream>

#include "lanet/error.hpp"

namespace lanet::model {

namespace {

constexpr char kMagic[8] = {'L', 'A', 'N', 'E', 'T', 'C', 'K', 'P'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put_le(std::ostream& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw ValidationError("checkpoint is truncated");
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

nlohmann::json to_json(const data::Vocabularies& v) {
  return {{"labels", v.labels()},
          {"ids", v.ids()},
          {"dt_values", v.dt_values()},
          {"amount_edges", v.amount_edges()}};
}

data::Vocabularies vocab_from_json(const nlohmann::json& j) {
  return data::Vocabularies(j.at("labels").get<std::vector<std::string>>(),
                            j.at("ids").get<std::vector<std::string>>(),
                            j.at("dt_values").get<std::vector<int>>(),
                            j.at("amount_edges").get<std::vector<double>>());
}

void save_checkpoint(std::ostream& out, const Model& model) {
  nlohmann::json tensors = nlohmann::json::array();
  for (const auto& e : model.params().entries()) {
    tensors.push_back({{"name", e.name}, {"shape", e.tensor.shape()}});
  }
  nlohmann::json meta{{"config", to_json(model.config())},
                      {"vocab", to_json(model.vocab())},
                      {"normalizer",
                       {{"mean", model.normalizer().mean}, {"stddev", model.normalizer().stddev}}},
                      {"tensors", tensors}};
  const std::string text = meta.dump();
  out.write(kMagic, sizeof kMagic);
  put_le<std::uint32_t>(out, kVersion);
  put_le<std::uint64_t>(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& e : model.params().entries()) {
    for (double v : e.tensor.data()) put_le<double>(out, v);
  }
  if (!out) throw std::runtime_error("failed to write checkpoint");
}

void save_checkpoint(const std::filesystem::path& path, const Model& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  save_checkpoint(out, model);
}

Model load_checkpoint(std::istream& in) {
  char magic[sizeof kMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw ValidationError("not a checkpoint file");
  }
  const auto version = get_le<std::uint32_t>(in);
  if (version != kVersion) {
    throw ValidationError("unsupported checkpoint version " + std::to_string(version));
  }
  const auto length = get_le<std::uint64_t>(in);
  std::string text(length, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(length))) {
    throw ValidationError("checkpoint is truncated");
  }
  const auto meta = nlohmann::json::parse(text);
  AmountNormalizer norm{meta.at("normalizer").at("mean").get<std::vector<double>>(),
                        meta.at("normalizer").at("stddev").get<std::vector<double>>()};
  Model model(model_config_from_json(meta.at("config")), vocab_from_json(meta.at("vocab")),
              std::move(norm), 0);

  const auto& index = meta.at("tensors");
  auto& entries = model.params().entries();
  if (index.size() != entries.size()) {
    throw ValidationError("checkpoint holds " + std::to_string(index.size()) +
                          " tensors, model expects " + std::to_string(entries.size()));
  }
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto name = index[i].at("name").get<std::string>();
    const auto shape = index[i].at("shape").get<num::Shape>();
    if (name != entries[i].name || shape != entries[i].tensor.shape()) {
      throw ValidationError("checkpoint tensor '" + name + "' " + num::shape_str(shape) +
                            " does not match model tensor '" + entries[i].name + "' " +
                            num::shape_str(entries[i].tensor.shape()));
    }
    for (double& v : entries[i].tensor.mutable_data()) v = get_le<double>(in);
  }
  return model;
}

Model load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return load_checkpoint(in);
}

}  // namespace lanet::model
