#include "lanet/cli/commands.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>

#include "lanet/error.hpp"
#include "lanet/eval/metrics.hpp"
#include "lanet/model/checkpoint.hpp"
#include "lanet/synth/graph.hpp"

namespace lanet::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* date_format_name(data::DateFormat f) { return f == data::DateFormat::iso ? "iso" : "dmy"; }

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": malformed JSON (" + e.what() + ")");
  }
}

// `b` may replace the default `a`: counts need nonnegative integers.
bool same_kind(const json& a, const json& b) {
  if (a.is_number_unsigned()) return b.is_number_integer() && b.get<std::int64_t>() >= 0;
  if (a.is_number() && b.is_number()) return true;
  return a.type() == b.type();
}

void log_warnings(const data::PreparedData& d, std::ostream& log) {
  for (const auto& w : d.split.warnings) log << "warning: " << w << '\n';
}

std::string joined(const std::vector<std::string>& xs) {
  std::string s;
  for (const auto& x : xs) s += (s.empty() ? "" : ", ") + x;
  return s;
}

}  // namespace

void RunConfig::validate() const {
  if (!(valid_fraction > 0.0 && test_fraction > 0.0 && valid_fraction + test_fraction < 1.0)) {
    throw ConfigError("valid_fraction and test_fraction must be positive with a sum below 1");
  }
  if (n_amount_bins < 1) throw ConfigError("n_amount_bins must be >= 1");
  model.validate();
  train.validate();
}

std::string RunConfig::dataset_name() const {
  if (!dataset.empty()) return dataset;
  return data.empty() ? "data" : fs::path(data).stem().string();
}

data::PrepareOptions RunConfig::prepare_options() const {
  data::PrepareOptions o;
  o.tau = static_cast<int>(model.tau);
  o.n_amount_bins = n_amount_bins;
  o.fractions = {1.0 - valid_fraction - test_fraction, valid_fraction, test_fraction};
  return o;
}

std::string model_label(const model::ModelConfig& c) {
  std::string s = model::variant_name(c.variant);
  if (c.absence_indication) s += "+absence";
  if (c.drop.drop_amount) s += "-no_amount";
  if (c.drop.drop_time) s += "-no_time";
  if (c.drop.drop_id) s += "-no_id";
  return s;
}

json to_json(const RunConfig& c) {
  json j{{"data", c.data},
         {"dataset", c.dataset},
         {"name", c.name},
         {"date_format", date_format_name(c.date_format)},
         {"n_amount_bins", c.n_amount_bins},
         {"valid_fraction", c.valid_fraction},
         {"test_fraction", c.test_fraction}};
  j.update(model::to_json(c.model));
  j.update(train::to_json(c.train));
  return j;
}

std::vector<std::string> run_config_keys() {
  const json defaults = to_json(RunConfig{});
  std::vector<std::string> keys;
  for (const auto& [k, v] : defaults.items()) keys.push_back(k);
  return keys;  // json objects iterate in key order
}

RunConfig run_config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  json merged = to_json(RunConfig{});
  std::vector<std::string> unknown;
  for (const auto& [k, v] : j.items()) {
    if (!merged.contains(k)) unknown.push_back(k);
  }
  if (!unknown.empty()) throw ConfigError("unknown config keys: " + joined(unknown));
  for (const auto& [k, v] : j.items()) {
    if (!same_kind(merged[k], v)) {
      throw ConfigError("config key '" + k + "' has the wrong type (expected " +
                        std::string(merged[k].type_name()) + ")");
    }
    merged[k] = v;
  }
  RunConfig c;
  try {
    c.data = merged.at("data").get<std::string>();
    c.dataset = merged.at("dataset").get<std::string>();
    c.name = merged.at("name").get<std::string>();
    c.date_format = data::parse_date_format(merged.at("date_format").get<std::string>());
    c.n_amount_bins = merged.at("n_amount_bins").get<std::size_t>();
    c.valid_fraction = merged.at("valid_fraction").get<double>();
    c.test_fraction = merged.at("test_fraction").get<double>();
    c.model = model::model_config_from_json(merged);
    c.train = train::train_config_from_json(merged);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid config value: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const fs::path& path) { return run_config_from_json(read_json_file(path)); }

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 unavailable");
  }
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return hex.str();
}

json to_json(const RunManifest& m) {
  return {{"tool_version", m.tool_version},
          {"config", to_json(m.config)},
          {"dataset_sha256", m.dataset_sha256},
          {"seeds", m.seeds},
          {"artifacts", m.artifacts}};
}

RunManifest manifest_from_json(const json& j) {
  static const std::set<std::string> keys{"tool_version", "config", "dataset_sha256", "seeds", "artifacts"};
  std::vector<std::string> unknown;
  for (const auto& [k, v] : j.items())
    if (!keys.count(k)) unknown.push_back(k);
  if (!unknown.empty()) throw ConfigError("unknown manifest keys: " + joined(unknown));
  RunManifest m;
  try {
    m.tool_version = j.at("tool_version").get<std::string>();
    m.config = run_config_from_json(j.at("config"));
    m.dataset_sha256 = j.at("dataset_sha256").get<std::string>();
    m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    m.artifacts = j.at("artifacts").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid manifest: ") + e.what());
  }
  if (m.seeds != m.config.train.seeds) throw ConfigError("manifest seeds differ from its config");
  return m;
}

RunManifest load_manifest(const fs::path& path) { return manifest_from_json(read_json_file(path)); }

std::vector<data::EventRecord> load_events(const RunConfig& c) {
  if (c.data.empty()) throw ConfigError("no data path given (config key 'data' or --data)");
  return data::parse_csv_file(c.data, c.date_format);
}

json cmd_stats(const fs::path& data_path, data::DateFormat format) {
  const auto s = data::dataset_stats(data::parse_csv_file(data_path, format));
  return {{"events", s.events},
          {"median_set_size", s.median_set_size},
          {"max_set_size", s.max_set_size},
          {"unique_labels", s.unique_labels},
          {"diff", s.diff}};
}

TrainOutcome cmd_train(const RunConfig& config, const fs::path& run_dir, std::ostream& log) {
  config.validate();
  RunConfig resolved = config;
  resolved.data = fs::absolute(config.data).lexically_normal().string();
  resolved.dataset = config.dataset_name();

  TrainOutcome out;
  out.run_dir = run_dir;
  out.manifest.config = resolved;
  out.manifest.dataset_sha256 = sha256_file(resolved.data);
  out.manifest.seeds = resolved.train.seeds;

  const auto d = data::prepare(load_events(resolved), resolved.prepare_options());
  log_warnings(d, log);
  log << "train " << model_label(resolved.model) << " on " << resolved.dataset << ": " << d.train.size()
      << '/' << d.valid.size() << '/' << d.test.size() << " windows, K=" << d.vocab.label_count() << '\n';

  fs::create_directories(run_dir);
  out.result = train::run_multiseed(d, resolved.model, resolved.train, run_dir,
                                    [&log](std::uint64_t seed, const train::EpochRecord& e) {
                                      log << "seed " << seed << " epoch " << e.epoch << " loss "
                                          << data::format_double(e.train_loss) << " valid_micro_auc "
                                          << data::format_double(e.valid_micro_auc) << '\n';
                                    });

  std::ostringstream metrics;
  eval::write_metrics_csv(metrics,
                          train::metric_rows(resolved.dataset, model_label(resolved.model), out.result));
  eval::write_text_file(run_dir / "metrics.csv", metrics.str());

  out.manifest.artifacts.push_back("metrics.csv");
  for (auto seed : resolved.train.seeds) {
    const std::string dir = "seed" + std::to_string(seed) + "/";
    for (const char* f : {"checkpoint", "metrics.csv", "thresholds.csv", "config.json"}) {
      out.manifest.artifacts.push_back(dir + f);
    }
  }
  eval::write_text_file(run_dir / "manifest.json", to_json(out.manifest).dump(2) + "\n");
  return out;
}

TrainOutcome cmd_replay(const RunManifest& manifest, const fs::path& run_dir, std::ostream& log) {
  const std::string actual = sha256_file(manifest.config.data);
  if (actual != manifest.dataset_sha256) {
    throw ValidationError("dataset checksum mismatch for " + manifest.config.data + ": expected " +
                          manifest.dataset_sha256 + ", found " + actual);
  }
  if (manifest.tool_version != kToolVersion) {
    log << "warning: manifest written by version " << manifest.tool_version << ", running " << kToolVersion
        << '\n';
  }
  return cmd_train(manifest.config, run_dir, log);
}

namespace {

data::PreparedData prepare_for(const model::Model& m, const fs::path& data_path, data::DateFormat format,
                               const data::SplitFractions& fractions) {
  data::PrepareOptions o;
  o.tau = static_cast<int>(m.config().tau);
  o.fractions = fractions;
  auto d = data::prepare_with_vocab(data::parse_csv_file(data_path, format), o, m.vocab());
  if (d.train.empty() && d.valid.empty() && d.test.empty()) {
    throw ValidationError("dataset " + data_path.string() + " yields no windows of size " +
                          std::to_string(o.tau));
  }
  return d;
}

}  // namespace

EvalOutcome cmd_eval(const fs::path& checkpoint, const fs::path& data_path, data::DateFormat format,
                     const data::SplitFractions& fractions, const std::optional<fs::path>& out_dir) {
  const auto m = model::load_checkpoint(checkpoint);
  const auto d = prepare_for(m, data_path, format, fractions);
  if (d.valid.empty() || d.test.empty()) throw ValidationError("validation or test split is empty");
  const auto valid = train::score_matrix(m, d.valid);
  const auto auc = eval::micro_macro_auc(valid);
  EvalOutcome r{model_label(m.config()), auc.micro, auc.macro,
                eval::evaluate(valid, train::score_matrix(m, d.test))};
  if (out_dir) {
    fs::create_directories(*out_dir);
    const std::string dataset = data_path.stem().string();
    std::vector<eval::MetricRow> rows{{dataset, r.model_name, "checkpoint", "valid_micro_auc", r.valid_micro_auc},
                                      {dataset, r.model_name, "checkpoint", "valid_macro_auc", r.valid_macro_auc}};
    for (const auto& [k, v] : r.test.named()) rows.push_back({dataset, r.model_name, "checkpoint", k, v});
    std::ostringstream metrics, thresholds;
    eval::write_metrics_csv(metrics, rows);
    eval::write_text_file(*out_dir / "metrics.csv", metrics.str());
    eval::write_thresholds_csv(thresholds, d.vocab.labels(), r.test.thresholds);
    eval::write_text_file(*out_dir / "thresholds.csv", thresholds.str());
  }
  return r;
}

eval::RankTable cmd_rank(const std::vector<fs::path>& metrics_files) {
  if (metrics_files.empty()) throw ConfigError("no metrics files to rank");
  eval::ResultGrid grid;
  for (const auto& f : metrics_files) {
    std::ifstream in(f);
    if (!in) throw std::runtime_error("cannot open " + f.string());
    for (const auto& r : eval::read_metrics_csv(in)) {
      if (r.seed == "mean") grid[r.dataset][r.model][r.metric] = r.value;
    }
  }
  if (grid.empty()) throw ValidationError("no mean rows found in the metrics files");
  return eval::rank_table(grid);
}

SweepAxis parse_sweep_axis(const std::string& name) {
  if (name == "tau") return SweepAxis::tau;
  if (name == "dim") return SweepAxis::dim;
  throw ConfigError("unknown sweep axis '" + name + "' (expected tau or dim)");
}

std::string sweep_axis_name(SweepAxis a) { return a == SweepAxis::tau ? "tau" : "dim"; }

void write_sweep_csv(std::ostream& out, SweepAxis axis, const std::vector<SweepRow>& rows) {
  out << "axis,value,seed,micro_auc,macro_auc\n";
  for (const auto& r : rows) {
    out << sweep_axis_name(axis) << ',' << r.value << ',' << r.seed << ',' << data::format_double(r.micro_auc)
        << ',' << data::format_double(r.macro_auc) << '\n';
  }
}

std::vector<SweepRow> cmd_sweep(const RunConfig& config, SweepAxis axis, const std::vector<std::size_t>& values,
                                const fs::path& out_dir, std::ostream& log) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  config.validate();
  const auto events = load_events(config);
  std::vector<SweepRow> rows;
  for (auto v : values) {
    RunConfig c = config;
    (axis == SweepAxis::tau ? c.model.tau : c.model.d_c) = v;
    c.validate();
    const auto d = data::prepare(events, c.prepare_options());
    log_warnings(d, log);
    for (auto seed : c.train.seeds) {
      const auto r = train::train_model(d, c.model, c.train, seed).record;
      rows.push_back({v, seed, r.test.micro_auc, r.test.macro_auc});
      log << sweep_axis_name(axis) << '=' << v << " seed " << seed << " micro_auc "
          << data::format_double(r.test.micro_auc) << '\n';
    }
  }
  fs::create_directories(out_dir);
  std::ostringstream csv;
  write_sweep_csv(csv, axis, rows);
  eval::write_text_file(out_dir / "sweep.csv", csv.str());
  return rows;
}

std::vector<data::EventRecord> cmd_synth(const fs::path& graph_path, std::size_t n_ids,
                                         std::size_t events_per_id, std::uint64_t seed, const fs::path& out) {
  if (n_ids < 1 || events_per_id < 1) throw ConfigError("ids and events must be >= 1");
  const auto g = synth::load_graph(graph_path.string());
  auto events = synth::generate(g, n_ids, events_per_id, seed);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  data::write_csv_file(out, events);
  return events;
}

SampleSet parse_sample_set(const std::string& name) {
  if (name == "train") return SampleSet::train;
  if (name == "valid") return SampleSet::valid;
  if (name == "test") return SampleSet::test;
  if (name == "all") return SampleSet::all;
  throw ConfigError("unknown split '" + name + "' (expected train, valid, test or all)");
}

model::AttentionMap cmd_export_attention(const fs::path& checkpoint, const fs::path& data_path,
                                         data::DateFormat format, const data::SplitFractions& fractions,
                                         SampleSet which, const fs::path& out) {
  const auto m = model::load_checkpoint(checkpoint);
  if (!m.config().has_label_branch()) {
    throw ConfigError("checkpoint variant " + model::variant_name(m.config().variant) +
                      " has no label attention to export");
  }
  auto d = prepare_for(m, data_path, format, fractions);
  std::vector<data::EncodedSample> samples;
  auto take = [&samples](std::vector<data::EncodedSample>& xs) {
    std::move(xs.begin(), xs.end(), std::back_inserter(samples));
  };
  if (which == SampleSet::train || which == SampleSet::all) take(d.train);
  if (which == SampleSet::valid || which == SampleSet::all) take(d.valid);
  if (which == SampleSet::test || which == SampleSet::all) take(d.test);
  const auto map = model::export_attention(m, samples);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  model::write_attention_csv_file(out, map);
  return map;
}

}  // namespace lanet::cli
