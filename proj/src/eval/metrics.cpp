#include "lanet/eval/metrics.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <sstream>

#include "lanet/data/events.hpp"
#include "lanet/error.hpp"

namespace lanet::eval {

ScoreMatrix::ScoreMatrix(std::size_t r, std::size_t c)
    : rows(r), cols(c), scores(r * c, 0.0), targets(r * c, 0.0) {}

void ScoreMatrix::append(const std::vector<double>& score_row, const std::vector<double>& target_row) {
  if (rows == 0 && cols == 0) cols = score_row.size();
  if (score_row.size() != cols || target_row.size() != cols) {
    throw DimensionError("score row of length " + std::to_string(score_row.size()) +
                         " does not fit a matrix with " + std::to_string(cols) + " columns");
  }
  scores.insert(scores.end(), score_row.begin(), score_row.end());
  targets.insert(targets.end(), target_row.begin(), target_row.end());
  ++rows;
}

std::vector<double> ScoreMatrix::score_column(std::size_t k) const {
  std::vector<double> out(rows);
  for (std::size_t i = 0; i < rows; ++i) out[i] = score(i, k);
  return out;
}

std::vector<double> ScoreMatrix::target_column(std::size_t k) const {
  std::vector<double> out(rows);
  for (std::size_t i = 0; i < rows; ++i) out[i] = target(i, k);
  return out;
}

void ScoreMatrix::validate() const {
  if (scores.size() != rows * cols || targets.size() != rows * cols) {
    throw ValidationError("score matrix buffers do not match its shape");
  }
  for (double t : targets) {
    if (t != 0.0 && t != 1.0) throw ValidationError("targets must be 0 or 1");
  }
  for (double s : scores) {
    if (!(s >= 0.0 && s <= 1.0)) throw ValidationError("scores must lie in [0, 1]");
  }
}

namespace {

struct Group {
  double value;
  std::uint64_t pos;
  std::uint64_t neg;
};

// Distinct score values ascending with class counts.
std::vector<Group> grouped(std::span<const double> scores, std::span<const double> labels) {
  if (scores.size() != labels.size()) throw DimensionError("scores and labels differ in length");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  std::vector<Group> groups;
  for (std::size_t i : order) {
    if (groups.empty() || groups.back().value != scores[i]) groups.push_back({scores[i], 0, 0});
    (labels[i] != 0.0 ? groups.back().pos : groups.back().neg) += 1;
  }
  return groups;
}

// a_num / a_den > b_num / b_den, with zero denominators meaning zero.
bool greater_ratio(std::uint64_t an, std::uint64_t ad, std::uint64_t bn, std::uint64_t bd) {
  if (ad == 0) an = 0, ad = 1;
  if (bd == 0) bn = 0, bd = 1;
  return static_cast<unsigned __int128>(an) * bd > static_cast<unsigned __int128>(bn) * ad;
}

}  // namespace

std::optional<double> auc(std::span<const double> scores, std::span<const double> labels) {
  std::uint64_t wins = 0, ties = 0, neg_below = 0, P = 0, N = 0;
  for (const auto& g : grouped(scores, labels)) {
    wins += g.pos * neg_below;
    ties += g.pos * g.neg;
    neg_below += g.neg;
    P += g.pos;
    N += g.neg;
  }
  if (P == 0 || N == 0) return std::nullopt;
  return static_cast<double>(2 * wins + ties) / static_cast<double>(2 * P * N);
}

AucReport micro_macro_auc(const ScoreMatrix& sm) {
  sm.validate();
  if (sm.rows == 0 || sm.cols == 0) throw ValidationError("empty score matrix");
  AucReport r;
  auto micro = auc(sm.scores, sm.targets);
  if (!micro) throw ValidationError("micro-AUC undefined: pooled targets have a single class");
  r.micro = *micro;
  double total = 0.0;
  std::size_t used = 0;
  for (std::size_t k = 0; k < sm.cols; ++k) {
    auto a = auc(sm.score_column(k), sm.target_column(k));
    r.per_label.push_back(a);
    if (a) {
      total += *a;
      ++used;
    } else {
      ++r.skipped;
    }
  }
  if (used == 0) throw ValidationError("macro-AUC undefined: every label has a single class");
  r.macro = total / static_cast<double>(used);
  return r;
}

std::vector<double> threshold_candidates(std::span<const double> scores) {
  std::vector<double> v(scores.begin(), scores.end());
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  std::vector<double> c{0.0, 1.0};
  for (std::size_t i = 0; i + 1 < v.size(); ++i) c.push_back(0.5 * (v[i] + v[i + 1]));
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  return c;
}

double threshold_for_label(std::span<const double> scores, std::span<const double> labels) {
  const auto groups = grouped(scores, labels);
  std::uint64_t P = 0;
  for (const auto& g : groups) P += g.pos;
  if (P == 0) return 0.5;

  // suffix[g] = counts over groups g.. (predicted positive when the cut is below them)
  std::vector<std::uint64_t> suffix_pos(groups.size() + 1, 0), suffix_neg(groups.size() + 1, 0);
  for (std::size_t g = groups.size(); g-- > 0;) {
    suffix_pos[g] = suffix_pos[g + 1] + groups[g].pos;
    suffix_neg[g] = suffix_neg[g + 1] + groups[g].neg;
  }
  double best = 0.5;
  std::uint64_t best_num = 0, best_den = 0;
  bool first = true;
  std::size_t g = 0;
  for (double c : threshold_candidates(scores)) {
    while (g < groups.size() && groups[g].value <= c) ++g;
    const std::uint64_t tp = suffix_pos[g], fp = suffix_neg[g], fn = P - tp;
    const std::uint64_t num = 2 * tp, den = 2 * tp + fp + fn;
    if (first || greater_ratio(num, den, best_num, best_den)) {
      best = c;
      best_num = num;
      best_den = den;
      first = false;
    }
  }
  return best;
}

std::vector<double> fit_thresholds(const ScoreMatrix& valid) {
  valid.validate();
  std::vector<double> beta;
  for (std::size_t k = 0; k < valid.cols; ++k) {
    beta.push_back(threshold_for_label(valid.score_column(k), valid.target_column(k)));
  }
  return beta;
}

double Confusion::f1() const {
  const std::size_t den = 2 * tp + fp + fn;
  return den == 0 ? 0.0 : static_cast<double>(2 * tp) / static_cast<double>(den);
}

Confusion confusion(std::span<const double> scores, std::span<const double> labels, double beta) {
  if (scores.size() != labels.size()) throw DimensionError("scores and labels differ in length");
  Confusion c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool pred = scores[i] > beta, truth = labels[i] != 0.0;
    if (pred && truth) ++c.tp;
    else if (pred) ++c.fp;
    else if (truth) ++c.fn;
  }
  return c;
}

F1Report micro_macro_f1(const ScoreMatrix& sm, const std::vector<double>& thresholds) {
  sm.validate();
  if (thresholds.size() != sm.cols) {
    throw DimensionError(std::to_string(thresholds.size()) + " thresholds for " +
                         std::to_string(sm.cols) + " labels");
  }
  F1Report r;
  Confusion pooled;
  double total = 0.0;
  for (std::size_t k = 0; k < sm.cols; ++k) {
    Confusion c = confusion(sm.score_column(k), sm.target_column(k), thresholds[k]);
    pooled.tp += c.tp;
    pooled.fp += c.fp;
    pooled.fn += c.fn;
    r.per_label.push_back(c.f1());
    total += c.f1();
  }
  r.micro = pooled.f1();
  r.macro = sm.cols == 0 ? 0.0 : total / static_cast<double>(sm.cols);
  return r;
}

std::vector<std::pair<std::string, double>> MetricsReport::named() const {
  return {{"micro_auc", micro_auc}, {"macro_auc", macro_auc}, {"micro_f1", micro_f1},
          {"macro_f1", macro_f1}};
}

MetricsReport evaluate(const ScoreMatrix& valid, const ScoreMatrix& test) {
  MetricsReport m;
  m.thresholds = fit_thresholds(valid);
  auto a = micro_macro_auc(test);
  auto f = micro_macro_f1(test, m.thresholds);
  m.micro_auc = a.micro;
  m.macro_auc = a.macro;
  m.per_label_auc = a.per_label;
  m.skipped_labels = a.skipped;
  m.micro_f1 = f.micro;
  m.macro_f1 = f.macro;
  m.per_label_f1 = f.per_label;
  return m;
}

RankTable rank_table(const ResultGrid& results) {
  if (results.empty()) throw ValidationError("rank table needs at least one dataset");
  RankTable t;
  const auto& first = results.begin()->second;
  if (first.empty()) throw ValidationError("dataset '" + results.begin()->first + "' has no models");
  for (const auto& [model, metrics] : first) t.models.push_back(model);
  for (const auto& [metric, v] : first.begin()->second) t.metrics.push_back(metric);

  for (const auto& [dataset, models] : results) {
    for (const auto& [model, metrics] : models) {
      if (!first.count(model)) {
        throw ValidationError("dataset '" + dataset + "' has model '" + model +
                              "' missing from other datasets");
      }
    }
    for (const auto& model : t.models) {
      auto m = models.find(model);
      if (m == models.end()) {
        throw ValidationError("missing result for dataset '" + dataset + "', model '" + model + "'");
      }
      for (const auto& metric : t.metrics) {
        if (!m->second.count(metric)) {
          throw ValidationError("missing metric '" + metric + "' for dataset '" + dataset +
                                "', model '" + model + "'");
        }
      }
    }
    for (const auto& metric : t.metrics) {
      std::vector<std::pair<double, std::string>> v;
      for (const auto& model : t.models) v.emplace_back(models.at(model).at(metric), model);
      std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
      for (std::size_t i = 0; i < v.size();) {
        std::size_t j = i;
        while (j < v.size() && v[j].first == v[i].first) ++j;
        const double rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
        for (std::size_t k = i; k < j; ++k) t.mean_rank[v[k].second][metric] += rank;
        i = j;
      }
    }
  }
  for (auto& [model, per_metric] : t.mean_rank) {
    for (auto& [metric, r] : per_metric) r /= static_cast<double>(results.size());
  }
  return t;
}

void write_ranks_csv(std::ostream& out, const RankTable& t) {
  out << "model,metric,mean_rank\n";
  for (const auto& model : t.models) {
    for (const auto& metric : t.metrics) {
      out << model << ',' << metric << ',' << data::format_double(t.mean_rank.at(model).at(metric))
          << '\n';
    }
  }
}

void write_thresholds_csv(std::ostream& out, const std::vector<std::string>& labels,
                          const std::vector<double>& thresholds) {
  out << "label,threshold\n";
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    out << labels.at(k) << ',' << data::format_double(thresholds[k]) << '\n';
  }
}

namespace {

void check_field(const std::string& f) {
  if (f.find_first_of(",\n\"") != std::string::npos) {
    throw ValidationError("metrics field '" + f + "' contains a separator");
  }
}

}  // namespace

void write_metrics_csv(std::ostream& out, const std::vector<MetricRow>& rows) {
  out << "dataset,model,seed,metric,value\n";
  for (const auto& r : rows) {
    for (const auto* f : {&r.dataset, &r.model, &r.seed, &r.metric}) check_field(*f);
    out << r.dataset << ',' << r.model << ',' << r.seed << ',' << r.metric << ','
        << data::format_double(r.value) << '\n';
  }
}

std::vector<MetricRow> read_metrics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "dataset,model,seed,metric,value") {
    throw ParseError(1, "expected header dataset,model,seed,metric,value");
  }
  std::vector<MetricRow> rows;
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 5) throw ParseError(n, "expected 5 fields");
    try {
      rows.push_back({f[0], f[1], f[2], f[3], std::stod(f[4])});
    } catch (const std::logic_error&) {
      throw ParseError(n, "bad value '" + f[4] + "'");
    }
  }
  return rows;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace lanet::eval
