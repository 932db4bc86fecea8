#include "lanet/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "lanet/data/events.hpp"
#include "lanet/error.hpp"
#include "lanet/model/checkpoint.hpp"
#include "lanet/num/optim.hpp"

namespace lanet::train {

PlateauScheduler::PlateauScheduler(SchedulerConfig config, double lr) : config_(config), lr_(lr) {}

double PlateauScheduler::step(double metric) {
  improved_ = !best_ || metric > *best_;
  if (improved_) {
    best_ = metric;
    wait_ = 0;
    return lr_;
  }
  if (++wait_ >= config_.patience) {
    lr_ = std::max(lr_ * config_.factor, config_.min_lr);
    wait_ = 0;
  }
  return lr_;
}

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(lr > 0.0)) throw ConfigError("lr must be positive");
  if (!(scheduler.factor > 0.0 && scheduler.factor < 1.0)) {
    throw ConfigError("scheduler factor must lie in (0, 1)");
  }
  if (scheduler.patience < 1) throw ConfigError("scheduler patience must be >= 1");
  if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
  if (early_stop_patience < 1) throw ConfigError("early_stop_patience must be >= 1");
  if (seeds.empty()) throw ConfigError("at least one seed is required");
}

nlohmann::json to_json(const TrainConfig& c) {
  return {{"batch_size", c.batch_size},
          {"lr", c.lr},
          {"scheduler_factor", c.scheduler.factor},
          {"scheduler_patience", c.scheduler.patience},
          {"min_lr", c.scheduler.min_lr},
          {"max_epochs", c.max_epochs},
          {"early_stop_patience", c.early_stop_patience},
          {"seeds", c.seeds}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.lr = j.at("lr").get<double>();
  c.scheduler.factor = j.at("scheduler_factor").get<double>();
  c.scheduler.patience = j.at("scheduler_patience").get<std::size_t>();
  c.scheduler.min_lr = j.at("min_lr").get<double>();
  c.max_epochs = j.at("max_epochs").get<std::size_t>();
  c.early_stop_patience = j.at("early_stop_patience").get<std::size_t>();
  c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  c.validate();
  return c;
}

eval::ScoreMatrix score_matrix(const model::Model& m, const std::vector<data::EncodedSample>& samples) {
  eval::ScoreMatrix sm(0, m.label_count());
  for (const auto& s : samples) sm.append(m.scores(s), s.target);
  return sm;
}

eval::MetricsReport frequency_baseline(const data::PreparedData& d) {
  const std::size_t K = d.vocab.label_count();
  const auto f = model::frequency_scores(d.train, K);
  eval::ScoreMatrix valid(0, K), test(0, K);
  for (const auto& s : d.valid) valid.append(f, s.target);
  for (const auto& s : d.test) test.append(f, s.target);
  return eval::evaluate(valid, test);
}

namespace {

std::mt19937_64 derived_rng(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
  return std::mt19937_64(seq);
}

void require_split(const data::EncodedSample& s, data::Split expected) {
  if (s.split != expected) {
    throw std::logic_error(std::string("sample from the ") + data::split_name(s.split) + " split used as " +
                           data::split_name(expected) + " data");
  }
}

eval::ScoreMatrix split_scores(const model::Model& m, const std::vector<data::EncodedSample>& samples,
                               data::Split expected) {
  for (const auto& s : samples) require_split(s, expected);
  return score_matrix(m, samples);
}

std::vector<std::vector<double>> snapshot(const model::Model& m) {
  std::vector<std::vector<double>> out;
  for (const auto& e : m.params().entries()) out.emplace_back(e.tensor.data().begin(), e.tensor.data().end());
  return out;
}

void restore(model::Model& m, const std::vector<std::vector<double>>& values) {
  auto& entries = m.params().entries();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    std::copy(values[i].begin(), values[i].end(), entries[i].tensor.mutable_data().begin());
  }
}

}  // namespace

void write_epoch_csv(std::ostream& out, const std::vector<EpochRecord>& epochs) {
  out << "epoch,train_loss,valid_micro_auc,valid_macro_auc,lr\n";
  for (const auto& e : epochs) {
    out << e.epoch << ',' << data::format_double(e.train_loss) << ','
        << data::format_double(e.valid_micro_auc) << ',' << data::format_double(e.valid_macro_auc)
        << ',' << data::format_double(e.lr) << '\n';
  }
}

TrainResult train_model(const data::PreparedData& d, const model::ModelConfig& mc,
                        const TrainConfig& tc, std::uint64_t seed,
                        const std::optional<std::filesystem::path>& seed_dir,
                        const EpochCallback& on_epoch) {
  tc.validate();
  if (d.train.empty()) throw ValidationError("training split is empty");
  if (d.valid.empty()) throw ValidationError("validation split is empty");
  if (d.test.empty()) throw ValidationError("test split is empty");
  if (d.train.front().tau != mc.tau) {
    throw ConfigError("model tau " + std::to_string(mc.tau) + " differs from the data window " +
                      std::to_string(d.train.front().tau));
  }
  const std::size_t K = d.vocab.label_count();
  auto init_rng = derived_rng(seed, 0);
  model::Model m(mc, d.vocab, model::fit_amount_normalizer(d.train, K), init_rng());
  auto shuffle_rng = derived_rng(seed, 1);
  auto dropout_rng = derived_rng(seed, 2);

  num::Adam opt(m.params(), {.lr = tc.lr});
  PlateauScheduler scheduler(tc.scheduler, tc.lr);
  RunRecord rec;
  rec.seed = seed;
  auto best = snapshot(m);
  std::vector<std::size_t> order(d.train.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 1; epoch <= tc.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double total = 0.0;
    for (std::size_t start = 0, batch = 0; start < order.size(); start += tc.batch_size, ++batch) {
      const std::size_t end = std::min(order.size(), start + tc.batch_size);
      opt.zero_grad();
      std::vector<num::Tensor> losses;
      for (std::size_t i = start; i < end; ++i) {
        const auto& s = d.train[order[i]];
        require_split(s, data::Split::train);
        auto out = m.forward(s, num::Mode::train, dropout_rng);
        losses.push_back(num::bce_with_logits(out.logits, num::Tensor({1, K}, s.target)));
      }
      num::Tensor loss =
          num::scale(num::sum(num::concat_cols(losses)), 1.0 / static_cast<double>(end - start));
      if (!std::isfinite(loss.item())) {
        throw NumericError("non-finite training loss at seed " + std::to_string(seed) + ", epoch " +
                           std::to_string(epoch) + ", batch " + std::to_string(batch) +
                           " (lr " + data::format_double(opt.lr()) + ")");
      }
      loss.backward();
      opt.step();
      total += loss.item() * static_cast<double>(end - start);
    }

    const auto valid_auc = eval::micro_macro_auc(split_scores(m, d.valid, data::Split::valid));
    EpochRecord e{epoch, total / static_cast<double>(order.size()), valid_auc.micro, valid_auc.macro,
                  opt.lr()};
    rec.epochs.push_back(e);
    if (on_epoch) on_epoch(seed, e);
    if (rec.best_epoch == 0 || e.valid_micro_auc > rec.best_valid_micro_auc) {
      rec.best_epoch = epoch;
      rec.best_valid_micro_auc = e.valid_micro_auc;
      best = snapshot(m);
    }
    opt.set_lr(scheduler.step(e.valid_micro_auc));
    if (epoch - rec.best_epoch >= tc.early_stop_patience) break;
  }
  restore(m, best);

  rec.test = eval::evaluate(split_scores(m, d.valid, data::Split::valid),
                            split_scores(m, d.test, data::Split::test));

  if (seed_dir) {
    std::filesystem::create_directories(*seed_dir);
    rec.checkpoint = *seed_dir / "checkpoint";
    model::save_checkpoint(*rec.checkpoint, m);
    std::ostringstream epochs, thresholds;
    write_epoch_csv(epochs, rec.epochs);
    eval::write_text_file(*seed_dir / "metrics.csv", epochs.str());
    eval::write_thresholds_csv(thresholds, d.vocab.labels(), rec.test.thresholds);
    eval::write_text_file(*seed_dir / "thresholds.csv", thresholds.str());
    nlohmann::json cfg{{"model", model::to_json(mc)}, {"train", to_json(tc)}, {"seed", seed}};
    eval::write_text_file(*seed_dir / "config.json", cfg.dump(2) + "\n");
  }
  return {std::move(rec), std::move(m)};
}

Aggregate aggregate(const std::vector<RunRecord>& records) {
  if (records.empty()) throw ValidationError("no runs to aggregate");
  std::vector<const RunRecord*> sorted;
  for (const auto& r : records) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->seed < b->seed; });
  Aggregate agg;
  const double n = static_cast<double>(sorted.size());
  for (const auto& [name, v] : sorted.front()->test.named()) {
    double sum = 0.0;
    for (auto* r : sorted) {
      for (const auto& [k, x] : r->test.named())
        if (k == name) sum += x;
    }
    const double mean = sum / n;
    double sq = 0.0;
    for (auto* r : sorted) {
      for (const auto& [k, x] : r->test.named())
        if (k == name) sq += (x - mean) * (x - mean);
    }
    agg.mean[name] = mean;
    agg.stddev[name] = sorted.size() > 1 ? std::sqrt(sq / (n - 1.0)) : 0.0;
  }
  return agg;
}

MultiSeedResult run_multiseed(const data::PreparedData& d, const model::ModelConfig& mc,
                              const TrainConfig& tc, const std::optional<std::filesystem::path>& run_dir,
                              const EpochCallback& on_epoch) {
  tc.validate();
  MultiSeedResult r;
  for (auto seed : tc.seeds) {
    std::optional<std::filesystem::path> dir;
    if (run_dir) dir = *run_dir / ("seed" + std::to_string(seed));
    r.records.push_back(train_model(d, mc, tc, seed, dir, on_epoch).record);
  }
  r.aggregate = aggregate(r.records);
  return r;
}

std::vector<eval::MetricRow> metric_rows(const std::string& dataset, const std::string& model,
                                         const MultiSeedResult& r) {
  std::vector<eval::MetricRow> rows;
  for (const auto& rec : r.records) {
    for (const auto& [name, v] : rec.test.named()) {
      rows.push_back({dataset, model, std::to_string(rec.seed), name, v});
    }
  }
  for (const auto& [name, v] : r.records.front().test.named()) {
    rows.push_back({dataset, model, "mean", name, r.aggregate.mean.at(name)});
  }
  for (const auto& [name, v] : r.records.front().test.named()) {
    rows.push_back({dataset, model, "std", name, r.aggregate.stddev.at(name)});
  }
  return rows;
}

}  // namespace lanet::train
