#include <sstream>

#include "CLI11.hpp"
#include "lanet/cli/commands.hpp"
#include "lanet/error.hpp"
#include "lanet/eval/metrics.hpp"

namespace lanet::cli {

namespace fs = std::filesystem;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> config;
  std::optional<std::string> out;
  std::optional<std::string> date_format;
};

RunConfig resolve_config(const Globals& g, const std::optional<std::string>& data) {
  RunConfig c = g.config ? load_run_config(*g.config) : RunConfig{};
  if (data) c.data = *data;
  if (g.date_format) c.date_format = data::parse_date_format(*g.date_format);
  if (g.seed) c.train.seeds = {*g.seed};
  return c;
}

data::DateFormat resolve_format(const Globals& g, const std::optional<RunConfig>& c) {
  if (g.date_format) return data::parse_date_format(*g.date_format);
  return c ? c->date_format : data::DateFormat::iso;
}

data::SplitFractions resolve_fractions(const std::optional<RunConfig>& c) {
  return c ? c->prepare_options().fractions : data::SplitFractions{};
}

std::string one_line(std::string s) {
  for (auto& ch : s)
    if (ch == '\n' || ch == '\r') ch = ' ';
  return s;
}

void print_aggregate(std::ostream& out, const TrainOutcome& t) {
  out << "run_dir " << t.run_dir.string() << '\n';
  for (const auto& [k, v] : t.result.aggregate.mean) {
    out << k << ' ' << data::format_double(v) << " +- " << data::format_double(t.result.aggregate.stddev.at(k))
        << '\n';
  }
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"LANET: label-attention models for next-event label-set prediction"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Seed: replaces the config seed list; generator seed for synth");
  app.add_option("--config", g.config, "Run configuration JSON (flat keys)");
  app.add_option("--out", g.out, "Output directory or file, depending on the command");
  app.add_option("--date-format", g.date_format, "Date format of input CSVs: iso or dmy");

  auto* stats = app.add_subcommand("stats", "Dataset summary as JSON");
  std::string stats_data;
  stats->add_option("data", stats_data, "Canonical CSV")->required();

  auto* train = app.add_subcommand("train", "Multi-seed training run");
  std::optional<std::string> train_data, train_variant, train_manifest;
  train->add_option("--data", train_data, "Canonical CSV (overrides the config)");
  train->add_option("--variant", train_variant, "Model variant (overrides the config)");
  train->add_option("--manifest", train_manifest, "Replay a manifest.json; other settings are ignored");

  auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint, or rank models with --rank");
  std::optional<std::string> eval_ckpt, eval_data;
  std::vector<std::string> rank_files;
  ev->add_option("checkpoint", eval_ckpt, "Checkpoint file");
  ev->add_option("data", eval_data, "Canonical CSV");
  ev->add_option("--rank", rank_files, "Long-format metrics.csv files to rank");

  auto* sweep = app.add_subcommand("sweep", "Micro-AUC against tau or embedding size");
  std::string sweep_axis;
  std::vector<std::size_t> sweep_values;
  std::optional<std::string> sweep_data;
  sweep->add_option("--axis", sweep_axis, "tau or dim")->required();
  sweep->add_option("--values", sweep_values, "Comma-separated values")->required()->delimiter(',');
  sweep->add_option("--data", sweep_data, "Canonical CSV (overrides the config)");

  auto* syn = app.add_subcommand("synth", "Generate canonical CSV from a planted graph");
  std::string graph;
  std::size_t n_ids = 0, n_events = 0;
  syn->add_option("graph", graph, "Graph JSON")->required();
  syn->add_option("--ids", n_ids, "Number of sequence IDs")->required();
  syn->add_option("--events", n_events, "Events per ID")->required();

  auto* att = app.add_subcommand("export-attention", "Averaged label-attention map as CSV");
  std::string att_ckpt, att_data, att_split = "test";
  att->add_option("checkpoint", att_ckpt, "Checkpoint file")->required();
  att->add_option("data", att_data, "Canonical CSV")->required();
  att->add_option("--split", att_split, "Windows to average over: train, valid, test or all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << one_line(e.what()) << '\n';
    return 2;
  }

  try {
    if (stats->parsed()) {
      const std::optional<RunConfig> c = g.config ? std::optional(load_run_config(*g.config)) : std::nullopt;
      const auto j = cmd_stats(stats_data, resolve_format(g, c));
      if (g.out) eval::write_text_file(*g.out, j.dump(2) + "\n");
      out << j.dump(2) << '\n';
    } else if (train->parsed()) {
      if (train_manifest) {
        if (!g.out) throw ConfigError("--out is required when replaying a manifest");
        print_aggregate(out, cmd_replay(load_manifest(*train_manifest), *g.out, err));
      } else {
        RunConfig c = resolve_config(g, train_data);
        if (train_variant) c.model.variant = model::parse_variant(*train_variant);
        const fs::path dir = g.out ? fs::path(*g.out) : fs::path("run") / c.name;
        print_aggregate(out, cmd_train(c, dir, err));
      }
    } else if (ev->parsed()) {
      if (!rank_files.empty()) {
        if (eval_ckpt) throw ConfigError("--rank takes metrics files only");
        std::vector<fs::path> files(rank_files.begin(), rank_files.end());
        std::ostringstream csv;
        eval::write_ranks_csv(csv, cmd_rank(files));
        if (g.out) eval::write_text_file(*g.out, csv.str());
        out << csv.str();
      } else {
        if (!eval_ckpt || !eval_data) throw ConfigError("eval needs a checkpoint and a data file");
        const std::optional<RunConfig> c = g.config ? std::optional(load_run_config(*g.config)) : std::nullopt;
        std::optional<fs::path> dir;
        if (g.out) dir = *g.out;
        const auto r = cmd_eval(*eval_ckpt, *eval_data, resolve_format(g, c), resolve_fractions(c), dir);
        out << "model " << r.model_name << '\n'
            << "valid_micro_auc " << data::format_double(r.valid_micro_auc) << '\n'
            << "valid_macro_auc " << data::format_double(r.valid_macro_auc) << '\n';
        for (const auto& [k, v] : r.test.named()) out << k << ' ' << data::format_double(v) << '\n';
      }
    } else if (sweep->parsed()) {
      const RunConfig c = resolve_config(g, sweep_data);
      const auto axis = parse_sweep_axis(sweep_axis);
      const fs::path dir = g.out ? fs::path(*g.out) : fs::path("sweep") / c.name;
      write_sweep_csv(out, axis, cmd_sweep(c, axis, sweep_values, dir, err));
    } else if (syn->parsed()) {
      if (!g.out) throw ConfigError("synth needs --out");
      const auto events = cmd_synth(graph, n_ids, n_events, g.seed.value_or(1), *g.out);
      out << "wrote " << events.size() << " events to " << *g.out << '\n';
    } else if (att->parsed()) {
      if (!g.out) throw ConfigError("export-attention needs --out");
      const std::optional<RunConfig> c = g.config ? std::optional(load_run_config(*g.config)) : std::nullopt;
      const auto map = cmd_export_attention(att_ckpt, att_data, resolve_format(g, c), resolve_fractions(c),
                                            parse_sample_set(att_split), *g.out);
      out << "wrote " << map.size() << "x" << map.size() << " attention map to " << *g.out << '\n';
    }
  } catch (const ParseError& e) {
    err << "error: parse: " << one_line(e.what()) << '\n';
    return 1;
  } catch (const ConfigError& e) {
    err << "error: config: " << one_line(e.what()) << '\n';
    return 1;
  } catch (const ValidationError& e) {
    err << "error: validation: " << one_line(e.what()) << '\n';
    return 1;
  } catch (const DimensionError& e) {
    err << "error: dimension: " << one_line(e.what()) << '\n';
    return 1;
  } catch (const NumericError& e) {
    err << "error: numeric: " << one_line(e.what()) << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: runtime: " << one_line(e.what()) << '\n';
    return 1;
  }
  return 0;
}

}  // namespace lanet::cli
