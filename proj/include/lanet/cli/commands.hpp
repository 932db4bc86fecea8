#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lanet/data/encode.hpp"
#include "lanet/data/events.hpp"
#include "lanet/model/attention.hpp"
#include "lanet/model/config.hpp"
#include "lanet/train/trainer.hpp"

namespace lanet::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Flat run configuration. Every key is optional in the file; unknown keys
/// are rejected all at once.
struct RunConfig {
  std::string data;     // canonical CSV path
  std::string dataset;  // name in metrics.csv; defaults to the file stem
  std::string name = "run";
  data::DateFormat date_format = data::DateFormat::iso;
  std::size_t n_amount_bins = 100;
  double valid_fraction = 0.17;
  double test_fraction = 0.13;
  model::ModelConfig model;  // model.tau doubles as the window size
  train::TrainConfig train;

  void validate() const;
  std::string dataset_name() const;
  data::PrepareOptions prepare_options() const;
};

/// Variant name plus ablation suffixes, e.g. "lanet-no_amount".
std::string model_label(const model::ModelConfig& c);

/// Keys accepted by run_config_from_json, sorted.
std::vector<std::string> run_config_keys();
RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& c);
RunConfig load_run_config(const std::filesystem::path& path);

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Everything needed to replay a training run.
struct RunManifest {
  RunConfig config;  // all defaults resolved
  std::string dataset_sha256;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> artifacts;  // relative to the run directory
  std::string tool_version = kToolVersion;
};

nlohmann::json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);
RunManifest load_manifest(const std::filesystem::path& path);

std::vector<data::EventRecord> load_events(const RunConfig& c);

// Commands. Progress goes to `log`; failures throw.

nlohmann::json cmd_stats(const std::filesystem::path& data_path, data::DateFormat format);

struct TrainOutcome {
  std::filesystem::path run_dir;
  RunManifest manifest;
  train::MultiSeedResult result;
};

/// Trains every seed into run_dir, then writes manifest.json and the long
/// metrics.csv there.
TrainOutcome cmd_train(const RunConfig& config, const std::filesystem::path& run_dir, std::ostream& log);

/// Re-executes a manifest after verifying the dataset checksum.
TrainOutcome cmd_replay(const RunManifest& manifest, const std::filesystem::path& run_dir,
                        std::ostream& log);

struct EvalOutcome {
  std::string model_name;
  double valid_micro_auc = 0.0;
  double valid_macro_auc = 0.0;
  eval::MetricsReport test;  // thresholds fitted on validation
};

/// Evaluates a checkpoint on the valid/test windows of a dataset.
/// Writes metrics.csv and thresholds.csv into out_dir when given.
EvalOutcome cmd_eval(const std::filesystem::path& checkpoint, const std::filesystem::path& data_path,
                     data::DateFormat format, const data::SplitFractions& fractions,
                     const std::optional<std::filesystem::path>& out_dir);

/// Mean-rank table from long metrics files (their "mean" rows).
eval::RankTable cmd_rank(const std::vector<std::filesystem::path>& metrics_files);

enum class SweepAxis { tau, dim };
SweepAxis parse_sweep_axis(const std::string& name);
std::string sweep_axis_name(SweepAxis a);

struct SweepRow {
  std::size_t value = 0;
  std::uint64_t seed = 0;
  double micro_auc = 0.0;
  double macro_auc = 0.0;
};

/// One run per value and seed; writes sweep.csv (axis,value,seed,micro_auc,
/// macro_auc) into out_dir.
std::vector<SweepRow> cmd_sweep(const RunConfig& config, SweepAxis axis,
                                const std::vector<std::size_t>& values,
                                const std::filesystem::path& out_dir, std::ostream& log);
void write_sweep_csv(std::ostream& out, SweepAxis axis, const std::vector<SweepRow>& rows);

/// Generates events from a graph JSON and writes canonical CSV.
std::vector<data::EventRecord> cmd_synth(const std::filesystem::path& graph_path, std::size_t n_ids,
                                         std::size_t events_per_id, std::uint64_t seed,
                                         const std::filesystem::path& out);

enum class SampleSet { train, valid, test, all };
SampleSet parse_sample_set(const std::string& name);

/// Averaged attention map over the chosen windows of a dataset.
model::AttentionMap cmd_export_attention(const std::filesystem::path& checkpoint,
                                         const std::filesystem::path& data_path, data::DateFormat format,
                                         const data::SplitFractions& fractions, SampleSet which,
                                         const std::filesystem::path& out);

/// Runs the command line; never throws. Errors print one line
/// "error: <kind>: <reason>" to `err` and return nonzero.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace lanet::cli
