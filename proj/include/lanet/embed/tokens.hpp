#pragma once

#include <cstddef>
#include <string>

#include "lanet/data/encode.hpp"
#include "lanet/num/params.hpp"

namespace lanet::embed {

using num::Tensor;

/// Widths of the three concatenated token blocks.
struct BlockWidths {
  std::size_t label = 0;
  std::size_t time = 0;
  std::size_t amount = 0;
  std::size_t total() const { return label + time + amount; }
};

/// "component": every block is d; "total": the blocks split d between them.
enum class DimMode { component, total };
BlockWidths block_widths(std::size_t d, DimMode mode);

struct TableSizes {
  std::size_t labels = 0;
  std::size_t ids = 0;
  std::size_t dts = 0;
  std::size_t positions = 0;
  std::size_t bins = 0;

  static TableSizes from_vocab(const data::Vocabularies& vocab, std::size_t tau);
};

struct EmbeddingTables {
  BlockWidths widths;
  Tensor label;     // K x widths.label
  Tensor dt;        // dts x widths.time
  Tensor position;  // tau x widths.time
  Tensor amount;    // bins x widths.amount
  Tensor id;        // ids x D
  Tensor absence;   // 1 x D, undefined unless absence indication is on
};

/// Registers every table in `params` under `prefix`, drawn from N(0, 1).
EmbeddingTables make_tables(num::ParamSet& params, const std::string& prefix,
                            const TableSizes& sizes, BlockWidths widths, bool absence_indication,
                            num::Rng& rng);

enum class Component { amount, time, id };
Component parse_component(const std::string& name);
std::string component_name(Component c);

struct AssemblyFlags {
  bool drop_amount = false;
  bool drop_time = false;
  bool drop_id = false;

  void drop(Component c);
  std::size_t id_rows() const { return drop_id ? 0 : 1; }
};

/// (K+1) x D token matrix: row 0 is the ID token (absent when the ID is
/// dropped), row 1 + k is label k. A label token is
/// [label_k | sum of dt + position over its occurrences | sum of amount
/// embeddings over its occurrences]; labels missing from the window get zero
/// time and amount blocks, plus the absence vector when it exists.
Tensor assemble_tokens(const data::EncodedSample& sample, const EmbeddingTables& tables,
                       const AssemblyFlags& flags);

/// One token per window position, oldest first, in the same layout:
/// [sum of label embeddings | dt + position | sum of amount embeddings].
/// The ID token is prepended unless dropped.
Tensor assemble_time_tokens(const data::EncodedSample& sample, const EmbeddingTables& tables,
                            const AssemblyFlags& flags);

}  // namespace lanet::embed
