#include "lanet/embed/tokens.hpp"

#include <utility>
#include <vector>

#include "lanet/error.hpp"

namespace lanet::embed {

using Pairs = std::vector<std::pair<std::size_t, std::size_t>>;

BlockWidths block_widths(std::size_t d, DimMode mode) {
  if (d == 0) throw ConfigError("embedding dimension must be positive");
  if (mode == DimMode::component) return {d, d, d};
  if (d < 3) throw ConfigError("total embedding dimension must be at least 3");
  const std::size_t third = d / 3;
  return {d - 2 * third, third, third};
}

TableSizes TableSizes::from_vocab(const data::Vocabularies& vocab, std::size_t tau) {
  return {vocab.label_count(), vocab.id_count(), vocab.dt_count(), tau, vocab.bin_count()};
}

EmbeddingTables make_tables(num::ParamSet& params, const std::string& prefix,
                            const TableSizes& sizes, BlockWidths widths, bool absence_indication,
                            num::Rng& rng) {
  if (sizes.labels == 0) throw ConfigError("label vocabulary is empty");
  if (sizes.positions == 0) throw ConfigError("tau must be >= 1");
  EmbeddingTables t;
  t.widths = widths;
  t.label = params.add(prefix + "label", num::normal_init(sizes.labels, widths.label, rng));
  t.dt = params.add(prefix + "dt", num::normal_init(sizes.dts, widths.time, rng));
  t.position = params.add(prefix + "position", num::normal_init(sizes.positions, widths.time, rng));
  t.amount = params.add(prefix + "amount", num::normal_init(sizes.bins, widths.amount, rng));
  t.id = params.add(prefix + "id", num::normal_init(sizes.ids, widths.total(), rng));
  if (absence_indication) {
    t.absence = params.add(prefix + "absence", num::normal_init(1, widths.total(), rng));
  }
  return t;
}

Component parse_component(const std::string& name) {
  if (name == "amount") return Component::amount;
  if (name == "time") return Component::time;
  if (name == "id") return Component::id;
  throw ConfigError("unknown component '" + name + "' (expected amount, time or id)");
}

std::string component_name(Component c) {
  switch (c) {
    case Component::amount: return "amount";
    case Component::time: return "time";
    case Component::id: return "id";
  }
  return "";
}

void AssemblyFlags::drop(Component c) {
  switch (c) {
    case Component::amount: drop_amount = true; break;
    case Component::time: drop_time = true; break;
    case Component::id: drop_id = true; break;
  }
}

namespace {

void check_sample(const data::EncodedSample& s, const EmbeddingTables& t) {
  const std::size_t K = t.label.rows();
  if (s.target.size() != K) {
    throw DimensionError("sample has " + std::to_string(s.target.size()) + " labels, tables have " +
                         std::to_string(K));
  }
  if (s.id >= t.id.rows()) throw std::logic_error("ID index outside the embedding table");
  if (s.tau > t.position.rows()) throw DimensionError("window longer than the position table");
  for (std::size_t dt : s.dt_per_position) {
    if (dt >= t.dt.rows()) throw std::logic_error("dt index outside the embedding table");
  }
  for (const auto& o : s.occurrences) {
    if (o.label >= K || o.bin >= t.amount.rows() || o.position >= s.tau) {
      throw std::logic_error("occurrence index outside the embedding tables");
    }
  }
}

Tensor with_id_row(const Tensor& body, const data::EncodedSample& s, const EmbeddingTables& t,
                   const AssemblyFlags& flags) {
  if (flags.drop_id) return body;
  return num::concat_rows({num::embedding_bag(t.id, 1, {{0, s.id}}), body});
}

}  // namespace

Tensor assemble_tokens(const data::EncodedSample& s, const EmbeddingTables& t,
                       const AssemblyFlags& flags) {
  check_sample(s, t);
  const std::size_t K = t.label.rows();
  std::vector<Tensor> blocks{t.label};

  if (flags.drop_time) {
    blocks.push_back(Tensor::zeros({K, t.widths.time}));
  } else {
    Pairs dts, positions;
    for (const auto& o : s.occurrences) {
      dts.emplace_back(o.label, o.dt);
      positions.emplace_back(o.label, o.position);
    }
    blocks.push_back(num::add(num::embedding_bag(t.dt, K, dts),
                              num::embedding_bag(t.position, K, positions)));
  }

  if (flags.drop_amount) {
    blocks.push_back(Tensor::zeros({K, t.widths.amount}));
  } else {
    Pairs bins;
    for (const auto& o : s.occurrences) bins.emplace_back(o.label, o.bin);
    blocks.push_back(num::embedding_bag(t.amount, K, bins));
  }

  Tensor body = num::concat_cols(blocks);
  if (t.absence.defined()) {
    std::vector<bool> present(K, false);
    for (const auto& o : s.occurrences) present[o.label] = true;
    Pairs absent;
    for (std::size_t k = 0; k < K; ++k) {
      if (!present[k]) absent.emplace_back(k, 0);
    }
    body = num::add(body, num::embedding_bag(t.absence, K, absent));
  }
  return with_id_row(body, s, t, flags);
}

Tensor assemble_time_tokens(const data::EncodedSample& s, const EmbeddingTables& t,
                            const AssemblyFlags& flags) {
  check_sample(s, t);
  const std::size_t T = s.tau;
  Pairs labels;
  for (const auto& o : s.occurrences) labels.emplace_back(o.position, o.label);
  std::vector<Tensor> blocks{num::embedding_bag(t.label, T, labels)};

  if (flags.drop_time) {
    blocks.push_back(Tensor::zeros({T, t.widths.time}));
  } else {
    Pairs dts, positions;
    for (std::size_t p = 0; p < T; ++p) {
      dts.emplace_back(p, s.dt_per_position[p]);
      positions.emplace_back(p, p);
    }
    blocks.push_back(num::add(num::embedding_bag(t.dt, T, dts),
                              num::embedding_bag(t.position, T, positions)));
  }

  if (flags.drop_amount) {
    blocks.push_back(Tensor::zeros({T, t.widths.amount}));
  } else {
    Pairs bins;
    for (const auto& o : s.occurrences) bins.emplace_back(o.position, o.bin);
    blocks.push_back(num::embedding_bag(t.amount, T, bins));
  }
  return with_id_row(num::concat_cols(blocks), s, t, flags);
}

}  // namespace lanet::embed
