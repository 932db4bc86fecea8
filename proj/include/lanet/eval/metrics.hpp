#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace lanet::eval {

/// n_samples x K scores in [0, 1] with aligned 0/1 targets, row-major.
struct ScoreMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> scores;
  std::vector<double> targets;

  ScoreMatrix() = default;
  ScoreMatrix(std::size_t rows, std::size_t cols);
  double score(std::size_t i, std::size_t k) const { return scores[i * cols + k]; }
  double target(std::size_t i, std::size_t k) const { return targets[i * cols + k]; }
  void append(const std::vector<double>& score_row, const std::vector<double>& target_row);
  std::vector<double> score_column(std::size_t k) const;
  std::vector<double> target_column(std::size_t k) const;
  /// Throws ValidationError on inconsistent sizes, non-binary targets or
  /// scores outside [0, 1].
  void validate() const;
};

/// Mann-Whitney AUC with ties counted as one half; nullopt when the labels
/// are all positive or all negative.
std::optional<double> auc(std::span<const double> scores, std::span<const double> labels);

struct AucReport {
  double micro = 0.0;
  double macro = 0.0;
  std::vector<std::optional<double>> per_label;
  std::size_t skipped = 0;  // labels with a single class, left out of macro
};

/// Throws ValidationError when the pooled universe or every label is degenerate.
AucReport micro_macro_auc(const ScoreMatrix& sm);

/// Per-label threshold maximizing validation F1 over the candidates {0, 1}
/// and the midpoints between consecutive distinct scores; ties go to the
/// smallest threshold, labels without positives get 0.5.
std::vector<double> fit_thresholds(const ScoreMatrix& valid);
double threshold_for_label(std::span<const double> scores, std::span<const double> labels);

/// The candidate set used by fit_thresholds for one label, ascending.
std::vector<double> threshold_candidates(std::span<const double> scores);

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double f1() const;  // 0 when tp + fp + fn == 0
};

Confusion confusion(std::span<const double> scores, std::span<const double> labels, double beta);

struct F1Report {
  double micro = 0.0;
  double macro = 0.0;
  std::vector<double> per_label;
};

/// Predictions are score > beta_k.
F1Report micro_macro_f1(const ScoreMatrix& sm, const std::vector<double>& thresholds);

struct MetricsReport {
  double micro_auc = 0.0;
  double macro_auc = 0.0;
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  std::vector<std::optional<double>> per_label_auc;
  std::vector<double> per_label_f1;
  std::size_t skipped_labels = 0;
  std::vector<double> thresholds;

  /// (name, value) pairs in a fixed order.
  std::vector<std::pair<std::string, double>> named() const;
};

/// Thresholds are fitted on `valid` and applied to `test`.
MetricsReport evaluate(const ScoreMatrix& valid, const ScoreMatrix& test);

/// results[dataset][model][metric] = value, higher is better.
using ResultGrid = std::map<std::string, std::map<std::string, std::map<std::string, double>>>;

struct RankTable {
  std::vector<std::string> models;
  std::vector<std::string> metrics;
  std::map<std::string, std::map<std::string, double>> mean_rank;  // [model][metric]
};

/// Ranks models per dataset and metric (1 = best, ties share the mean of
/// their ranks) and averages over datasets. Throws ValidationError naming
/// the dataset and model of a missing cell.
RankTable rank_table(const ResultGrid& results);

void write_ranks_csv(std::ostream& out, const RankTable& table);
void write_thresholds_csv(std::ostream& out, const std::vector<std::string>& labels,
                          const std::vector<double>& thresholds);

struct MetricRow {
  std::string dataset;
  std::string model;
  std::string seed;  // seed number, "mean" or "std"
  std::string metric;
  double value = 0.0;
};

/// Long format: dataset,model,seed,metric,value.
void write_metrics_csv(std::ostream& out, const std::vector<MetricRow>& rows);
std::vector<MetricRow> read_metrics_csv(std::istream& in);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace lanet::eval
