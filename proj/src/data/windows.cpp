#include "lanet/data/windows.hpp"

#include <cmath>
#include <map>

#include "lanet/error.hpp"

namespace lanet::data {

const char* split_name(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::valid: return "valid";
    case Split::test: return "test";
  }
  return "?";
}

std::vector<WindowSample> make_windows(const std::vector<Sequence>& sequences, int tau,
                                       int stride) {
  if (tau < 1) throw ConfigError("window size tau must be >= 1, got " + std::to_string(tau));
  if (stride < 1) throw ConfigError("stride must be >= 1, got " + std::to_string(stride));
  const auto t = static_cast<std::size_t>(tau);
  std::vector<WindowSample> out;
  for (std::size_t s = 0; s < sequences.size(); ++s) {
    const auto& events = sequences[s].events;
    if (events.size() < t + 1) continue;
    for (std::size_t start = 0; start + t < events.size(); start += static_cast<std::size_t>(stride)) {
      WindowSample w;
      w.sequence_index = s;
      w.sequence_id = sequences[s].id;
      for (std::size_t p = start; p < start + t; ++p) {
        w.window.push_back(events[p]);
        if (p == 0) w.dts.push_back(std::nullopt);
        else w.dts.push_back(days_between(events[p - 1].date, events[p].date));
      }
      w.target = events[start + t];
      out.push_back(std::move(w));
    }
  }
  return out;
}

SplitDataset split_chronological(std::vector<WindowSample> samples, SplitFractions fractions) {
  if (fractions.valid < 0 || fractions.test < 0 || fractions.valid + fractions.test > 1.0) {
    throw ConfigError("split fractions must be nonnegative with valid + test <= 1");
  }
  std::map<std::size_t, std::vector<WindowSample>> by_seq;
  for (auto& s : samples) by_seq[s.sequence_index].push_back(std::move(s));

  SplitDataset out;
  for (auto& [seq, group] : by_seq) {
    for (std::size_t i = 1; i < group.size(); ++i) {
      if (!(group[i - 1].target.date < group[i].target.date)) {
        throw ValidationError("samples of ID '" + group[i].sequence_id +
                              "' are not sorted by target date");
      }
    }
    const std::size_t n = group.size();
    std::size_t n_valid = 0, n_test = 0;
    if (n < 3) {
      out.warnings.push_back("ID '" + group[0].sequence_id + "' has " + std::to_string(n) +
                             " samples; all assigned to train");
    } else {
      // The small epsilon keeps exact products such as 0.17 * 100 from
      // flooring one below.
      n_valid = static_cast<std::size_t>(std::floor(fractions.valid * static_cast<double>(n) + 1e-9));
      n_test = static_cast<std::size_t>(std::floor(fractions.test * static_cast<double>(n) + 1e-9));
    }
    const std::size_t n_train = n - n_valid - n_test;
    for (std::size_t i = 0; i < n; ++i) {
      auto& s = group[i];
      if (i < n_train) {
        s.split = Split::train;
        out.train.push_back(std::move(s));
      } else if (i < n_train + n_valid) {
        s.split = Split::valid;
        out.valid.push_back(std::move(s));
      } else {
        s.split = Split::test;
        out.test.push_back(std::move(s));
      }
    }
  }
  return out;
}

}  // namespace lanet::data
