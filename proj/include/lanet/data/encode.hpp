#pragma once

#include <cstddef>
#include <vector>

#include "lanet/data/vocab.hpp"
#include "lanet/data/windows.hpp"

namespace lanet::data {

/// One (label, position) occurrence inside a window, indexed against the
/// fitted vocabularies.
struct LabelOccurrence {
  std::size_t label = 0;
  std::size_t position = 0;  // 0-based window position, oldest first
  std::size_t dt = 0;        // dt index of the event at that position
  std::size_t bin = 0;       // amount bin
  double amount = 0.0;       // raw amount
};

/// A WindowSample resolved to vocabulary indices. Labels unseen in training
/// are dropped from both the window and the target.
struct EncodedSample {
  std::size_t id = 0;
  std::size_t sequence_index = 0;
  std::size_t tau = 0;
  std::vector<std::size_t> dt_per_position;
  std::vector<LabelOccurrence> occurrences;
  std::vector<double> target;  // length K, 0/1
  Split split = Split::train;
  Date target_date{};
};

EncodedSample encode_sample(const WindowSample& sample, const Vocabularies& vocab);
std::vector<EncodedSample> encode_samples(const std::vector<WindowSample>& samples,
                                          const Vocabularies& vocab);

struct PrepareOptions {
  int tau = 3;
  std::size_t n_amount_bins = 100;
  SplitFractions fractions{};
};

/// Everything downstream of a parsed event list: windows, split,
/// train-only vocabularies and encoded samples per split.
struct PreparedData {
  std::vector<Sequence> sequences;
  SplitDataset split;
  Vocabularies vocab;
  std::vector<EncodedSample> train;
  std::vector<EncodedSample> valid;
  std::vector<EncodedSample> test;
};

PreparedData prepare(std::vector<EventRecord> events, const PrepareOptions& options);

/// Same as prepare() but indexes against existing vocabularies, e.g. the ones
/// stored in a checkpoint.
PreparedData prepare_with_vocab(std::vector<EventRecord> events, const PrepareOptions& options,
                                const Vocabularies& vocab);

struct DatasetStats {
  std::size_t events = 0;
  double median_set_size = 0.0;
  std::size_t max_set_size = 0;
  std::size_t unique_labels = 0;
  // q95 - q5 of per-label frequencies (share of events carrying the label).
  double diff = 0.0;
};

DatasetStats dataset_stats(const std::vector<EventRecord>& events);

}  // namespace lanet::data
