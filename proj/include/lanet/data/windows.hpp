#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "lanet/data/events.hpp"

namespace lanet::data {

enum class Split { train, valid, test };

const char* split_name(Split s);

/// `tau` consecutive events of one ID plus the event that follows them.
struct WindowSample {
  std::size_t sequence_index = 0;  // position in the grouped sequence list
  std::string sequence_id;
  std::vector<EventRecord> window;
  // Day gap between each window event and its predecessor in the full
  // sequence; empty for the first event of a sequence.
  std::vector<std::optional<int>> dts;
  EventRecord target;
  Split split = Split::train;
};

/// One sample per valid window position (stride 1 by default) for every ID
/// with at least tau + 1 events. Throws ConfigError when tau or stride < 1.
std::vector<WindowSample> make_windows(const std::vector<Sequence>& sequences, int tau,
                                       int stride = 1);

struct SplitFractions {
  double train = 0.70;
  double valid = 0.17;
  double test = 0.13;
};

struct SplitDataset {
  std::vector<WindowSample> train;
  std::vector<WindowSample> valid;
  std::vector<WindowSample> test;
  std::vector<std::string> warnings;
};

/// Per-ID contiguous prefix/middle/suffix split. Validation and test counts
/// are floored, the remainder goes to training. IDs with fewer than three
/// samples go entirely to training and produce a warning.
SplitDataset split_chronological(std::vector<WindowSample> samples, SplitFractions fractions = {});

}  // namespace lanet::data
