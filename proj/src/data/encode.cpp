#include "lanet/data/encode.hpp"

#include <algorithm>
#include <map>

#include "lanet/error.hpp"

namespace lanet::data {

EncodedSample encode_sample(const WindowSample& sample, const Vocabularies& vocab) {
  EncodedSample e;
  e.id = vocab.id_index(sample.sequence_id);
  e.sequence_index = sample.sequence_index;
  e.tau = sample.window.size();
  e.split = sample.split;
  e.target_date = sample.target.date;
  for (std::size_t p = 0; p < sample.window.size(); ++p) {
    const auto& ev = sample.window[p];
    const std::size_t dt = vocab.dt_index(sample.dts[p]);
    e.dt_per_position.push_back(dt);
    for (std::size_t i = 0; i < ev.labels.size(); ++i) {
      auto k = vocab.label_index(ev.labels[i]);
      if (!k) continue;
      e.occurrences.push_back({*k, p, dt, vocab.amount_bin(ev.amounts[i]), ev.amounts[i]});
    }
  }
  e.target.assign(vocab.label_count(), 0.0);
  for (const auto& l : sample.target.labels) {
    if (auto k = vocab.label_index(l)) e.target[*k] = 1.0;
  }
  return e;
}

std::vector<EncodedSample> encode_samples(const std::vector<WindowSample>& samples,
                                          const Vocabularies& vocab) {
  std::vector<EncodedSample> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(encode_sample(s, vocab));
  return out;
}

namespace {

PreparedData prepare_impl(std::vector<EventRecord> events, const PrepareOptions& options,
                          const Vocabularies* fixed) {
  PreparedData d;
  d.sequences = group_by_id(std::move(events));
  d.split = split_chronological(make_windows(d.sequences, options.tau), options.fractions);
  d.vocab = fixed ? *fixed : fit_vocabularies(d.split.train, options.n_amount_bins);
  d.train = encode_samples(d.split.train, d.vocab);
  d.valid = encode_samples(d.split.valid, d.vocab);
  d.test = encode_samples(d.split.test, d.vocab);
  return d;
}

}  // namespace

PreparedData prepare(std::vector<EventRecord> events, const PrepareOptions& options) {
  return prepare_impl(std::move(events), options, nullptr);
}

PreparedData prepare_with_vocab(std::vector<EventRecord> events, const PrepareOptions& options,
                                const Vocabularies& vocab) {
  return prepare_impl(std::move(events), options, &vocab);
}

DatasetStats dataset_stats(const std::vector<EventRecord>& events) {
  DatasetStats s;
  s.events = events.size();
  if (events.empty()) return s;
  std::vector<double> sizes;
  std::map<std::string, std::size_t> counts;
  for (const auto& e : events) {
    sizes.push_back(static_cast<double>(e.labels.size()));
    s.max_set_size = std::max(s.max_set_size, e.labels.size());
    for (const auto& l : e.labels) ++counts[l];
  }
  std::sort(sizes.begin(), sizes.end());
  const std::size_t n = sizes.size();
  s.median_set_size = n % 2 ? sizes[n / 2] : 0.5 * (sizes[n / 2 - 1] + sizes[n / 2]);
  s.unique_labels = counts.size();
  std::vector<double> freqs;
  for (const auto& [label, c] : counts) freqs.push_back(static_cast<double>(c) / static_cast<double>(n));
  std::sort(freqs.begin(), freqs.end());
  s.diff = quantile_sorted(freqs, 0.95) - quantile_sorted(freqs, 0.05);
  return s;
}

}  // namespace lanet::data
