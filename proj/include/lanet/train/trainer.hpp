#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lanet/data/encode.hpp"
#include "lanet/eval/metrics.hpp"
#include "lanet/model/model.hpp"

namespace lanet::train {

struct SchedulerConfig {
  double factor = 0.5;
  std::size_t patience = 3;
  double min_lr = 1e-5;
};

/// Reduce-on-plateau for a maximized metric. The first observation sets the
/// best value; after `patience` consecutive epochs without a strict
/// improvement the rate is multiplied by `factor` (floored at min_lr) and
/// the counter restarts.
class PlateauScheduler {
 public:
  PlateauScheduler(SchedulerConfig config, double lr);
  /// Records one epoch's metric and returns the learning rate to use next.
  double step(double metric);
  double lr() const { return lr_; }
  bool last_improved() const { return improved_; }

 private:
  SchedulerConfig config_;
  double lr_;
  std::optional<double> best_;
  std::size_t wait_ = 0;
  bool improved_ = false;
};

struct TrainConfig {
  std::size_t batch_size = 32;
  double lr = 1e-3;
  SchedulerConfig scheduler;
  std::size_t max_epochs = 100;
  std::size_t early_stop_patience = 10;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};

  void validate() const;
};

nlohmann::json to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const nlohmann::json& j);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double valid_micro_auc = 0.0;
  double valid_macro_auc = 0.0;
  double lr = 0.0;  // rate used during the epoch
};

struct RunRecord {
  std::uint64_t seed = 0;
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  double best_valid_micro_auc = 0.0;
  std::optional<std::filesystem::path> checkpoint;
  eval::MetricsReport test;
};

/// Scores every sample in eval mode.
eval::ScoreMatrix score_matrix(const model::Model& m, const std::vector<data::EncodedSample>& samples);

/// Frequency-baseline metrics: each label scored by its training frequency.
eval::MetricsReport frequency_baseline(const data::PreparedData& d);

/// Optional per-epoch observer, e.g. for progress logging.
using EpochCallback = std::function<void(std::uint64_t seed, const EpochRecord&)>;

struct TrainResult {
  RunRecord record;
  model::Model model;  // best-validation parameters
};

/// Trains one model. Writes checkpoint, metrics.csv, thresholds.csv and
/// config.json into `seed_dir` when given. Throws ValidationError on empty
/// train or valid splits and NumericError on a non-finite loss.
TrainResult train_model(const data::PreparedData& d, const model::ModelConfig& mc,
                        const TrainConfig& tc, std::uint64_t seed,
                        const std::optional<std::filesystem::path>& seed_dir = std::nullopt,
                        const EpochCallback& on_epoch = nullptr);

struct Aggregate {
  std::map<std::string, double> mean;
  std::map<std::string, double> stddev;  // sample standard deviation, 0 for one seed
};

/// Mean and standard deviation of each named test metric; independent of
/// record order.
Aggregate aggregate(const std::vector<RunRecord>& records);

struct MultiSeedResult {
  std::vector<RunRecord> records;  // in seed-list order
  Aggregate aggregate;
};

/// Runs every seed in `tc.seeds`; per-seed outputs go to run_dir/seed<k>.
MultiSeedResult run_multiseed(const data::PreparedData& d, const model::ModelConfig& mc,
                              const TrainConfig& tc,
                              const std::optional<std::filesystem::path>& run_dir = std::nullopt,
                              const EpochCallback& on_epoch = nullptr);

/// Long-format rows: one per seed and metric, then mean and std rows.
std::vector<eval::MetricRow> metric_rows(const std::string& dataset, const std::string& model,
                                         const MultiSeedResult& r);

void write_epoch_csv(std::ostream& out, const std::vector<EpochRecord>& epochs);

}  // namespace lanet::train
