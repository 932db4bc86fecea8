#include "lanet/model/attention.hpp"

#include <fstream>

#include "lanet/data/events.hpp"
#include "lanet/error.hpp"

namespace lanet::model {

AttentionMap export_attention(const Model& model, const std::vector<data::EncodedSample>& samples) {
  if (samples.empty()) throw ValidationError("attention export needs at least one sample");
  if (!model.config().has_label_branch()) {
    throw ConfigError("variant " + variant_name(model.config().variant) +
                      " has no label attention to export");
  }
  AttentionMap map;
  if (!model.config().drop.drop_id) map.names.push_back("ID");
  for (const auto& l : model.vocab().labels()) map.names.push_back(l);
  const std::size_t n = map.size();
  map.weights.assign(n * n, 0.0);

  num::NoGradGuard guard;
  num::Rng unused(0);
  std::size_t count = 0;
  for (const auto& s : samples) {
    auto r = model.forward(s, num::Mode::eval, unused);
    for (const auto& layer : r.attention) {
      const std::size_t heads = layer.shape()[0];
      if (layer.shape()[1] != n) throw DimensionError("attention map size mismatch");
      auto w = layer.data();
      for (std::size_t h = 0; h < heads; ++h) {
        for (std::size_t i = 0; i < n * n; ++i) map.weights[i] += w[h * n * n + i];
      }
      count += heads;
    }
  }
  for (auto& v : map.weights) v /= static_cast<double>(count);
  return map;
}

namespace {

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void write_attention_csv(std::ostream& out, const AttentionMap& map) {
  out << "query";
  for (const auto& n : map.names) out << ',' << csv_cell(n);
  out << '\n';
  for (std::size_t q = 0; q < map.size(); ++q) {
    out << csv_cell(map.names[q]);
    for (std::size_t k = 0; k < map.size(); ++k) out << ',' << data::format_double(map(q, k));
    out << '\n';
  }
}

void write_attention_csv_file(const std::filesystem::path& path, const AttentionMap& map) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_attention_csv(out, map);
}

}  // namespace lanet::model
