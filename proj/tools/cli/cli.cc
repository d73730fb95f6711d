#include "cli.h"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>

#include "hgmlp/dataset.h"
#include "hgmlp/error.h"
#include "hgmlp/model_io.h"
#include "hgmlp/report.h"
#include "hgmlp/rng.h"
#include "hgmlp/robustness.h"
#include "hgmlp/trainer.h"

#ifndef HGMLP_VERSION
#define HGMLP_VERSION "0.0.0"
#endif

namespace hgmlp::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  return s.substr(a, s.find_last_not_of(" \t") - a + 1);
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw InvalidArgument("empty item in list '" + text + "'");
    parts.push_back(item);
  }
  if (parts.empty()) throw InvalidArgument("empty list");
  return parts;
}

template <typename T>
T parse_number(const std::string& s) {
  std::size_t used = 0;
  T value{};
  try {
    if constexpr (std::is_floating_point_v<T>) {
      value = static_cast<T>(std::stod(s, &used));
    } else {
      if (!s.empty() && s[0] == '-') throw std::invalid_argument(s);
      value = static_cast<T>(std::stoull(s, &used));
    }
  } catch (const std::logic_error&) {
    throw InvalidArgument("not a number: '" + s + "'");
  }
  if (used != s.size()) throw InvalidArgument("not a number: '" + s + "'");
  return value;
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json read_json(const fs::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

// One manifest line per invocation, appended to a JSON-lines file.
struct Manifest {
  std::string command;
  std::vector<std::string> argv;
  json config = json::object();
  std::optional<std::uint64_t> seed;
  bool deterministic = false;
  std::vector<std::string> artifacts;
  std::string started_at = timestamp();
  fs::path file;

  void append(const std::string& status) const {
    if (file.empty()) return;
    json j = {{"command", command},
              {"argv", argv},
              {"config", config},
              {"seed", seed ? json(*seed) : json(nullptr)},
              {"deterministic", deterministic},
              {"artifacts", artifacts},
              {"status", status},
              {"tool_version", HGMLP_VERSION},
              {"started_at", started_at},
              {"finished_at", timestamp()}};
    if (file.has_parent_path()) fs::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::app);
    if (!out) throw IoError("cannot append manifest " + file.string());
    out << j.dump() << '\n';
  }
};

fs::path manifest_next_to(const std::string& explicit_path, const fs::path& artifact) {
  if (!explicit_path.empty()) return explicit_path;
  return (artifact.has_parent_path() ? artifact.parent_path() : fs::path(".")) /
         "manifests.jsonl";
}

SplitAssignment split_from_sidecar(const json& sidecar, std::size_t n,
                                   std::optional<std::uint64_t> seed_override) {
  const json extra = sidecar.value("extra", json::object());
  if (!seed_override && !extra.contains("seed")) {
    throw InvalidArgument("model sidecar has no training seed; pass --seed");
  }
  const std::uint64_t seed =
      seed_override ? *seed_override : extra["seed"].get<std::uint64_t>();
  SplitRatios ratios;
  if (extra.contains("split")) {
    const auto r = extra["split"].get<std::vector<double>>();
    if (r.size() != 3) throw IoError("model sidecar: 'split' needs 3 ratios");
    ratios = {r[0], r[1], r[2]};
  }
  Rng rng = make_stream(seed, Stream::kSplit);
  return split(n, ratios, rng);
}

std::vector<std::size_t> nodes_for(const std::string& which,
                                   const SplitAssignment& s,
                                   std::span<const int> labels) {
  if (which == "all") {
    std::vector<std::size_t> all;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] >= 0) all.push_back(i);
    }
    return all;
  }
  if (which == "train") return s.labeled_nodes(SplitTag::kTrain, labels);
  if (which == "val") return s.labeled_nodes(SplitTag::kVal, labels);
  if (which == "test") return s.labeled_nodes(SplitTag::kTest, labels);
  throw InvalidArgument("--split must be train, val, test or all");
}

void check_model_matches(const ModelParams& p, const Dataset& ds) {
  if (p.input_dim() != ds.feature_dim()) {
    throw InvalidArgument("model expects " + std::to_string(p.input_dim()) +
                          " input features, dataset has " +
                          std::to_string(ds.feature_dim()));
  }
  if (p.num_classes() != static_cast<std::size_t>(ds.num_classes)) {
    throw InvalidArgument("model has " + std::to_string(p.num_classes()) +
                          " classes, dataset has " + std::to_string(ds.num_classes));
  }
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

// ---------------------------------------------------------------------------

struct GenArgs {
  SynthOptions synth;
  std::string output;
  std::string features_file;
  std::string from;
  double gaussian_sigma = 0.0;
  std::string manifest;
};

void cmd_gen(const GenArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
  Manifest mf;
  mf.command = "gen";
  mf.argv = argv;
  mf.seed = a.synth.seed;
  mf.deterministic = true;
  mf.file = manifest_next_to(a.manifest, a.output);
  Dataset ds;
  if (!a.from.empty()) {
    ds = load_dataset(a.from);
    mf.config = {{"from", a.from}};
  } else {
    ds = synth_generate(a.synth);
    mf.config = {{"n", a.synth.n},
                 {"m", a.synth.m},
                 {"c", a.synth.num_classes},
                 {"d", a.synth.feature_dim},
                 {"min_cardinality", a.synth.min_cardinality},
                 {"max_cardinality", a.synth.max_cardinality},
                 {"p_homo", a.synth.p_homo},
                 {"sigma_f", a.synth.sigma_f}};
  }
  if (a.gaussian_sigma > 0.0) {
    ds.features = gaussian_features(ds.num_nodes(), a.synth.feature_dim,
                                    a.gaussian_sigma, a.synth.seed);
    mf.config["gaussian_sigma"] = a.gaussian_sigma;
    mf.config["d"] = a.synth.feature_dim;
  }
  const fs::path path(a.output);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  save_dataset(ds, path, {a.features_file});
  mf.artifacts.push_back(path.string());
  if (!a.features_file.empty()) {
    mf.artifacts.push_back((path.parent_path() / a.features_file).string());
  }
  mf.append("ok");
  out << "wrote " << path.string() << " (n=" << ds.num_nodes()
      << ", m=" << ds.hypergraph.num_edges() << ", d=" << ds.feature_dim()
      << ", c=" << ds.num_classes << ")\n";
}

// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string dataset;
  std::string config_file;
  std::string model = "model.bin";
  std::string report;  // default: report.json next to the model
  std::string manifest;
  bool plain_mlp = false;
  bool deterministic = false;
  std::string grid;  // set when --grid given; may be empty for the default
  std::string seeds;
  // flag values; applied only when given
  double alpha = 0.0;
  std::uint64_t seed = 0;
  std::string hidden;
  std::size_t layers = 0;
  std::size_t width = 0;
  double dropout = 0.0;
  double lr = 0.0;
  std::string optimizer;
  std::size_t epochs = 0;
  std::size_t patience = 0;
  std::string split;
};

void cmd_train(const TrainArgs& a, const CLI::App& sub,
               const std::vector<std::string>& argv, std::ostream& out) {
  // defaults < config file < flags
  TrainConfig cfg;
  cfg.deterministic = false;
  if (!a.config_file.empty()) apply_config_json(read_json(a.config_file), cfg);
  json flags = json::object();
  auto given = [&](const char* name) { return sub.count(name) > 0; };
  if (given("--hidden")) flags["hidden"] = parse_size_list(a.hidden);
  if (given("--layers")) flags["layers"] = a.layers;
  if (given("--width")) flags["width"] = a.width;
  if (given("--alpha")) flags["alpha"] = a.alpha;
  if (given("--seed")) flags["seed"] = a.seed;
  if (given("--dropout")) flags["dropout"] = a.dropout;
  if (given("--lr")) flags["lr"] = a.lr;
  if (given("--optimizer")) flags["optimizer"] = a.optimizer;
  if (given("--epochs")) flags["epochs"] = a.epochs;
  if (given("--patience")) flags["patience"] = a.patience;
  if (given("--split")) flags["split"] = parse_real_list(a.split);
  apply_config_json(flags, cfg);
  if (a.deterministic) cfg.deterministic = true;
  if (a.plain_mlp) {
    cfg.objective = Objective::kCrossEntropyOnly;
    cfg.alpha = 0.0;
  }
  cfg.validate();

  const Dataset ds = load_dataset(a.dataset);
  const fs::path model_path(a.model);
  const fs::path report_path =
      a.report.empty() ? model_path.parent_path() / "report.json" : fs::path(a.report);
  if (model_path.has_parent_path()) fs::create_directories(model_path.parent_path());
  if (report_path.has_parent_path()) fs::create_directories(report_path.parent_path());

  Manifest mf;
  mf.command = "train";
  mf.argv = argv;
  mf.config = config_to_json(cfg);
  mf.config["plain_mlp"] = a.plain_mlp;
  mf.config["dataset"] = a.dataset;
  mf.seed = cfg.seed;
  mf.deterministic = cfg.deterministic;
  mf.file = manifest_next_to(a.manifest, model_path);

  const bool timings = !cfg.deterministic;
  json extra = {{"seed", cfg.seed},
                {"split", {cfg.split.train, cfg.split.val, cfg.split.test}},
                {"dataset", ds.name}};
  json report;
  try {
    if (given("--grid")) {
      const std::vector<double> grid =
          a.grid.empty() ? kDefaultAlphaGrid : parse_real_list(a.grid);
      std::vector<std::uint64_t> seeds;
      if (!a.seeds.empty()) {
        for (auto s : parse_seed_list(a.seeds)) seeds.push_back(s);
      }
      mf.config["grid"] = grid;
      mf.config["grid_seeds"] = seeds;
      const GridSearchResult g = grid_search_alpha(ds, ds.hypergraph, cfg, grid, seeds);
      const auto& best = g.entries[g.best_index];
      extra["seed"] = seeds.empty() ? cfg.seed : seeds.front();
      extra["alpha"] = best.alpha;
      save_model(best.runs.front().best_params, model_path, extra);
      report = grid_report(g, cfg, timings);
      out << "alpha      mean_val  mean_test\n";
      for (const auto& e : g.entries) {
        out << std::left << std::setw(10) << e.alpha << " ";
        if (e.failed) {
          out << "failed: " << e.error << "\n";
        } else {
          out << fixed(e.mean_val_acc) << "    " << fixed(e.mean_test_acc) << "\n";
        }
      }
      out << "best alpha " << g.best_alpha << "\n";
    } else {
      const TrainResult r = train(ds, ds.hypergraph, cfg);
      extra["alpha"] = cfg.alpha;
      save_model(r.best_params, model_path, extra);
      report = train_report(r, cfg, timings);
      out << "epochs " << r.epochs_run << ", best epoch " << r.best_epoch
          << ", val " << fixed(r.best_val_acc) << ", test " << fixed(r.test_acc)
          << "\n";
    }
  } catch (const NumericalError&) {
    mf.append("numerical_error");
    throw;
  }
  write_text(report_path, report.dump(2) + "\n");
  mf.artifacts = {model_path.string(), sidecar_path(model_path).string(),
                  report_path.string()};
  mf.append("ok");
}

// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string model;
  std::string dataset;
  std::string split = "test";
  std::string report;
  std::string manifest;
  std::uint64_t seed = 0;
};

void cmd_eval(const EvalArgs& a, const CLI::App& sub,
              const std::vector<std::string>& argv, std::ostream& out) {
  const LoadedModel m = load_model(a.model);
  const Dataset ds = load_dataset(a.dataset);
  check_model_matches(m.params, ds);
  std::optional<std::uint64_t> seed;
  if (sub.count("--seed") > 0) seed = a.seed;
  const SplitAssignment s = split_from_sidecar(m.sidecar, ds.num_nodes(), seed);
  const auto nodes = nodes_for(a.split, s, ds.labels);
  const Prediction p = predict(m.params, ds.features);
  const double acc = evaluate(p.classes, ds.labels, nodes);
  const json result = {{"split", a.split}, {"nodes", nodes.size()}, {"accuracy", acc}};

  Manifest mf;
  mf.command = "eval";
  mf.argv = argv;
  mf.config = {{"model", a.model}, {"dataset", a.dataset}, {"split", a.split}};
  mf.seed = seed ? *seed : m.sidecar["extra"].value("seed", std::uint64_t{0});
  mf.deterministic = true;
  mf.file = manifest_next_to(a.manifest, a.report.empty() ? fs::path(a.model)
                                                          : fs::path(a.report));
  if (!a.report.empty()) {
    write_text(a.report, result.dump(2) + "\n");
    mf.artifacts.push_back(a.report);
  }
  mf.append("ok");
  out << result.dump() << "\n";
}

// ---------------------------------------------------------------------------

struct SweepArgs {
  std::string model;
  std::string dataset;
  std::string ratios = "0,0.25,0.5,1.0";
  std::string seeds = "1..20";
  std::string split = "test";
  std::string output = "sweep.csv";
  std::string manifest;
  bool additive = false;
};

void cmd_sweep(const SweepArgs& a, const std::vector<std::string>& argv,
               std::ostream& out) {
  const LoadedModel m = load_model(a.model);
  const Dataset ds = load_dataset(a.dataset);
  check_model_matches(m.params, ds);
  const SplitAssignment s = split_from_sidecar(m.sidecar, ds.num_nodes(), std::nullopt);
  const auto nodes = nodes_for(a.split, s, ds.labels);
  const auto ratios = parse_real_list(a.ratios);
  std::vector<std::uint64_t> seeds;
  for (auto v : parse_seed_list(a.seeds)) seeds.push_back(v);
  const SweepResult r = robustness_sweep(m.params, ds, nodes, ratios, seeds, a.additive);

  std::ostringstream csv;
  write_sweep_csv(r, csv);
  write_text(a.output, csv.str());

  Manifest mf;
  mf.command = "sweep";
  mf.argv = argv;
  mf.config = {{"model", a.model},     {"dataset", a.dataset}, {"ratios", ratios},
               {"seeds", seeds},       {"split", a.split},     {"additive", a.additive}};
  mf.deterministic = true;
  mf.artifacts = {a.output};
  mf.file = manifest_next_to(a.manifest, a.output);
  mf.append("ok");
  out << r.cells.size() << " cells, clean accuracy " << fixed(r.clean_accuracy)
      << (r.constant ? ", all cells bitwise identical to the clean prediction"
                     : ", predictions changed under perturbation")
      << "\n";
}

// ---------------------------------------------------------------------------

struct BenchArgs {
  std::string model;
  std::string n_list = "5000";
  std::string m_list = "100,10000";
  std::size_t repeat = kMinLatencyRuns;
  std::size_t warmup = kMinLatencyWarmup;
  std::uint64_t seed = 0;
  std::string output = "bench.json";
  std::string manifest;
};

void cmd_bench(const BenchArgs& a, const std::vector<std::string>& argv,
               std::ostream& out) {
  const LoadedModel m = load_model(a.model);
  const auto ns = parse_size_list(a.n_list);
  const auto ms = parse_size_list(a.m_list);
  const LatencyReport r =
      latency_bench(m.params, ns, ms, {a.repeat, a.warmup, 50, a.seed});
  write_text(a.output, latency_report_json(r).dump(2) + "\n");

  Manifest mf;
  mf.command = "bench";
  mf.argv = argv;
  mf.config = {{"model", a.model}, {"n", ns},           {"m", ms},
               {"repeat", a.repeat}, {"warmup", a.warmup}};
  mf.seed = a.seed;
  mf.artifacts = {a.output};
  mf.file = manifest_next_to(a.manifest, a.output);
  mf.append("ok");
  for (const auto& e : r.entries) {
    out << "n=" << e.n << " m=" << e.m << " L=" << e.depth << "  median "
        << fixed(e.median_ms, 3) << " ms  p95 " << fixed(e.p95_ms, 3) << " ms\n";
  }
}

// ---------------------------------------------------------------------------

void report_sweep_csv(const std::string& text, std::ostream& out) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  if (trim(line) != "ratio,seed,accuracy") throw IoError("not a sweep CSV");
  std::vector<std::pair<double, std::vector<double>>> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto parts = split_commas(line);
    if (parts.size() != 3) throw IoError("bad sweep CSV line: " + line);
    const double ratio = parse_number<double>(parts[0]);
    if (rows.empty() || rows.back().first != ratio) rows.push_back({ratio, {}});
    rows.back().second.push_back(parse_number<double>(parts[2]));
  }
  out << "ratio     seeds  mean_acc  min_acc   max_acc\n";
  for (const auto& [ratio, accs] : rows) {
    double sum = 0.0, lo = 1.0, hi = 0.0;
    for (double v : accs) {
      sum += v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    out << std::left << std::setw(9) << ratio << " " << std::setw(6) << accs.size()
        << " " << fixed(sum / static_cast<double>(accs.size())) << "    "
        << fixed(lo) << "    " << fixed(hi) << "\n";
  }
}

void cmd_report(const std::vector<std::string>& inputs, const std::string& output,
                std::ostream& out) {
  std::ostringstream text;
  for (const auto& input : inputs) {
    text << "== " << input << "\n";
    const std::string raw = read_text(input);
    if (raw.rfind("ratio,", 0) == 0) {
      report_sweep_csv(raw, text);
      continue;
    }
    json j;
    try {
      j = json::parse(raw);
    } catch (const json::parse_error& e) {
      throw IoError(input + ": " + e.what());
    }
    if (j.contains("environment") && j.contains("entries")) {
      const LatencyReport r = latency_report_from_json(j);
      text << "n       m       L   runs   median_ms  p95_ms\n";
      for (const auto& e : r.entries) {
        text << std::left << std::setw(7) << e.n << " " << std::setw(7) << e.m
             << " " << std::setw(3) << e.depth << " " << std::setw(6) << e.runs
             << " " << std::setw(10) << fixed(e.median_ms, 3) << " "
             << fixed(e.p95_ms, 3) << "\n";
      }
      text << r.environment << "\n";
    } else if (j.contains("best_alpha")) {
      text << "alpha      mean_val  mean_test\n";
      for (const auto& e : j["entries"]) {
        text << std::left << std::setw(10) << e["alpha"].get<double>() << " ";
        if (e["failed"].get<bool>()) {
          text << "failed\n";
        } else {
          text << fixed(e["mean_val_acc"].get<double>()) << "    "
               << fixed(e["mean_test_acc"].get<double>()) << "\n";
        }
      }
      text << "best alpha " << j["best_alpha"].get<double>() << "\n";
    } else if (j.contains("history")) {
      text << "epochs " << j["epochs_run"] << ", best epoch " << j["best_epoch"]
           << "\nval " << fixed(j["best_val_acc"].get<double>()) << ", train "
           << fixed(j["train_acc"].get<double>()) << ", test "
           << fixed(j["test_acc"].get<double>()) << "\n";
    } else if (j.contains("accuracy")) {
      text << j["split"].get<std::string>() << " accuracy "
           << fixed(j["accuracy"].get<double>()) << "\n";
    } else {
      throw IoError(input + ": unrecognized report");
    }
  }
  if (output.empty()) {
    out << text.str();
  } else {
    write_text(output, text.str());
  }
}

}  // namespace

std::vector<unsigned long long> parse_seed_list(const std::string& text) {
  std::vector<unsigned long long> seeds;
  for (const auto& part : split_commas(text)) {
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      seeds.push_back(parse_number<unsigned long long>(part));
      continue;
    }
    const auto lo = parse_number<unsigned long long>(part.substr(0, dots));
    const auto hi = parse_number<unsigned long long>(part.substr(dots + 2));
    if (hi < lo) throw InvalidArgument("empty seed range '" + part + "'");
    if (hi - lo >= 1000000) throw InvalidArgument("seed range too long '" + part + "'");
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
  }
  return seeds;
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> values;
  for (const auto& part : split_commas(text)) values.push_back(parse_number<double>(part));
  return values;
}

std::vector<std::size_t> parse_size_list(const std::string& text) {
  std::vector<std::size_t> values;
  for (const auto& part : split_commas(text)) {
    values.push_back(parse_number<std::size_t>(part));
  }
  return values;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Structure-free node classification on hypergraphs",
               "hgmlp"};
  app.require_subcommand(1);
  app.set_version_flag("--version", HGMLP_VERSION);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic HGJSON dataset");
  gen_cmd->add_option("--n", gen.synth.n, "Nodes")->capture_default_str();
  gen_cmd->add_option("--m", gen.synth.m, "Hyperedges")->capture_default_str();
  gen_cmd->add_option("--c", gen.synth.num_classes, "Classes")->capture_default_str();
  gen_cmd->add_option("--d", gen.synth.feature_dim, "Feature dimension")
      ->capture_default_str();
  gen_cmd->add_option("--min-card", gen.synth.min_cardinality)->capture_default_str();
  gen_cmd->add_option("--max-card", gen.synth.max_cardinality)->capture_default_str();
  gen_cmd->add_option("--p-homo", gen.synth.p_homo, "Share of single-class hyperedges")
      ->capture_default_str();
  gen_cmd->add_option("--sigma-f", gen.synth.sigma_f, "Feature noise std")
      ->capture_default_str();
  gen_cmd->add_option("--seed", gen.synth.seed)->capture_default_str();
  gen_cmd->add_option("--from", gen.from,
                      "Start from an existing HGJSON file instead of generating");
  gen_cmd->add_option("--gaussian-sigma", gen.gaussian_sigma,
                      "Replace features with N(0, s^2) vectors of dimension --d");
  gen_cmd->add_option("--features-file", gen.features_file,
                      "Store features in this binary file next to the output");
  gen_cmd->add_option("-o,--output", gen.output, "Output HGJSON path")->required();
  gen_cmd->add_option("--manifest", gen.manifest, "Manifest file (JSON lines)");

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Train a model");
  train_cmd->add_option("-d,--dataset", tr.dataset, "HGJSON dataset")->required();
  train_cmd->add_option("--config", tr.config_file, "JSON config; flags override it");
  train_cmd->add_option("--alpha", tr.alpha, "Smoothness weight");
  train_cmd->add_option("--seed", tr.seed);
  train_cmd->add_option("--hidden", tr.hidden, "Comma-separated layer widths");
  train_cmd->add_option("--layers", tr.layers, "Depth of a uniform stack");
  train_cmd->add_option("--width", tr.width, "Width of a uniform stack");
  train_cmd->add_option("--dropout", tr.dropout);
  train_cmd->add_option("--lr", tr.lr);
  train_cmd->add_option("--optimizer", tr.optimizer)
      ->check(CLI::IsMember({"adam", "sgd"}));
  train_cmd->add_option("--epochs", tr.epochs);
  train_cmd->add_option("--patience", tr.patience);
  train_cmd->add_option("--split", tr.split, "train,val,test ratios");
  train_cmd->add_flag("--plain-mlp", tr.plain_mlp, "Cross-entropy only (alpha = 0)");
  train_cmd->add_option("--grid", tr.grid, "Grid-search alpha (optional list)")
      ->expected(0, 1);
  train_cmd->add_option("--seeds", tr.seeds, "Seeds averaged per grid point");
  train_cmd->add_flag("--deterministic", tr.deterministic, "Bitwise reproducible run");
  train_cmd->add_option("-o,--output", tr.model, "Model path")->capture_default_str();
  train_cmd->add_option("--report", tr.report, "Report path (default: next to the model)");
  train_cmd->add_option("--manifest", tr.manifest);

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a model on a split");
  eval_cmd->add_option("-m,--model", ev.model)->required();
  eval_cmd->add_option("-d,--dataset", ev.dataset)->required();
  eval_cmd->add_option("--split", ev.split)
      ->check(CLI::IsMember({"train", "val", "test", "all"}))
      ->capture_default_str();
  eval_cmd->add_option("--seed", ev.seed, "Split seed (default: the training seed)");
  eval_cmd->add_option("--report", ev.report, "Write the result as JSON");
  eval_cmd->add_option("--manifest", ev.manifest);
  eval_cmd->add_flag("--deterministic", "Accepted for symmetry; eval is deterministic");

  SweepArgs sw;
  auto* sweep_cmd = app.add_subcommand("sweep", "Fake-hyperedge robustness sweep");
  sweep_cmd->add_option("-m,--model", sw.model)->required();
  sweep_cmd->add_option("-d,--dataset", sw.dataset)->required();
  sweep_cmd->add_option("--ratios", sw.ratios)->capture_default_str();
  sweep_cmd->add_option("--seeds", sw.seeds, "List or range, e.g. 1..20")
      ->capture_default_str();
  sweep_cmd->add_option("--split", sw.split)
      ->check(CLI::IsMember({"train", "val", "test", "all"}))
      ->capture_default_str();
  sweep_cmd->add_flag("--additive", sw.additive, "Append fakes instead of replacing");
  sweep_cmd->add_option("-o,--output", sw.output)->capture_default_str();
  sweep_cmd->add_option("--manifest", sw.manifest);
  sweep_cmd->add_flag("--deterministic", "Accepted for symmetry; sweeps are deterministic");

  BenchArgs bn;
  auto* bench_cmd = app.add_subcommand("bench", "Inference latency benchmark");
  bench_cmd->add_option("-m,--model", bn.model)->required();
  bench_cmd->add_option("--n", bn.n_list, "Node counts")->capture_default_str();
  bench_cmd->add_option("--m-list", bn.m_list, "Hyperedge counts")->capture_default_str();
  bench_cmd->add_option("--repeat", bn.repeat)->capture_default_str();
  bench_cmd->add_option("--warmup", bn.warmup)->capture_default_str();
  bench_cmd->add_option("--seed", bn.seed)->capture_default_str();
  bench_cmd->add_option("-o,--output", bn.output)->capture_default_str();
  bench_cmd->add_option("--manifest", bn.manifest);

  std::vector<std::string> report_inputs;
  std::string report_output;
  auto* report_cmd = app.add_subcommand("report", "Summarize report, sweep or bench files");
  report_cmd->add_option("inputs", report_inputs)->required();
  report_cmd->add_option("-o,--output", report_output);

  std::vector<std::string> argv_copy = args;
  std::vector<char*> argv;
  std::string prog = "hgmlp";
  argv.push_back(prog.data());
  for (auto& a : argv_copy) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*gen_cmd) cmd_gen(gen, args, out);
    if (*train_cmd) cmd_train(tr, *train_cmd, args, out);
    if (*eval_cmd) cmd_eval(ev, *eval_cmd, args, out);
    if (*sweep_cmd) cmd_sweep(sw, args, out);
    if (*bench_cmd) cmd_bench(bn, args, out);
    if (*report_cmd) cmd_report(report_inputs, report_output, out);
  } catch (const NumericalError& e) {
    err << "hgmlp: numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const InvalidArgument& e) {
    err << "hgmlp: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "hgmlp: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "hgmlp: " << e.what() << "\n";
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "hgmlp: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "hgmlp: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace hgmlp::cli
