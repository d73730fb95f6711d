#include "hgmlp/report.h"

#include <set>
#include <string>

#include "hgmlp/error.h"

namespace hgmlp {
namespace {

using nlohmann::json;

const char* optimizer_name(OptimizerKind k) {
  return k == OptimizerKind::kAdam ? "adam" : "sgd";
}

json history_json(const TrainResult& r) {
  json epochs = json::array();
  for (const auto& e : r.history) {
    epochs.push_back({{"epoch", e.epoch},
                      {"ce", e.loss.ce},
                      {"smooth", e.loss.smooth},
                      {"total", e.loss.total},
                      {"train_acc", e.train_acc},
                      {"val_acc", e.val_acc}});
  }
  return epochs;
}

json timings_json(const PhaseTimings& t) {
  return {{"init_seconds", t.init_seconds},
          {"train_seconds", t.train_seconds},
          {"eval_seconds", t.eval_seconds}};
}

}  // namespace

json config_to_json(const TrainConfig& c) {
  return {{"hidden", c.hidden},
          {"layers", c.depth()},
          {"dropout", c.dropout},
          {"ln_eps", c.ln_eps},
          {"alpha", c.alpha},
          {"optimizer", optimizer_name(c.optimizer)},
          {"lr", c.adam.lr},
          {"beta1", c.adam.beta1},
          {"beta2", c.adam.beta2},
          {"adam_eps", c.adam.eps},
          {"epochs", c.epochs},
          {"patience", c.patience},
          {"split", {c.split.train, c.split.val, c.split.test}},
          {"seed", c.seed},
          {"deterministic", c.deterministic}};
}

void apply_config_json(const json& j, TrainConfig& c) {
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  static const std::set<std::string> kKnown = {
      "hidden", "layers", "width",  "dropout",  "ln_eps",        "alpha",
      "optimizer", "lr",  "beta1",  "beta2",    "adam_eps",      "epochs",
      "patience", "split", "seed",  "deterministic"};
  for (const auto& item : j.items()) {
    if (!kKnown.contains(item.key())) {
      throw InvalidArgument("config: unknown key '" + item.key() + "'");
    }
  }
  try {
    if (j.contains("hidden")) c.hidden = j["hidden"].get<std::vector<std::size_t>>();
    // "layers" + "width" describe a uniform stack; next to "hidden",
    // "layers" must agree with it.
    if (j.contains("hidden")) {
      if (j.contains("width")) {
        throw InvalidArgument("config: give either 'hidden' or 'width'");
      }
      if (j.contains("layers") && j["layers"].get<std::size_t>() != c.hidden.size()) {
        throw InvalidArgument("config: 'layers' disagrees with 'hidden'");
      }
    } else if (j.contains("layers") || j.contains("width")) {
      const std::size_t layers = j.value("layers", c.depth());
      const std::size_t width =
          j.value("width", c.hidden.empty() ? std::size_t{256} : c.hidden.front());
      c.hidden.assign(layers, width);
    }
    if (j.contains("dropout")) c.dropout = j["dropout"].get<double>();
    if (j.contains("ln_eps")) c.ln_eps = j["ln_eps"].get<double>();
    if (j.contains("alpha")) c.alpha = j["alpha"].get<double>();
    if (j.contains("optimizer")) {
      const auto name = j["optimizer"].get<std::string>();
      if (name == "adam") {
        c.optimizer = OptimizerKind::kAdam;
      } else if (name == "sgd") {
        c.optimizer = OptimizerKind::kSgd;
      } else {
        throw InvalidArgument("config: optimizer must be 'adam' or 'sgd'");
      }
    }
    if (j.contains("lr")) c.adam.lr = j["lr"].get<double>();
    if (j.contains("beta1")) c.adam.beta1 = j["beta1"].get<double>();
    if (j.contains("beta2")) c.adam.beta2 = j["beta2"].get<double>();
    if (j.contains("adam_eps")) c.adam.eps = j["adam_eps"].get<double>();
    if (j.contains("epochs")) c.epochs = j["epochs"].get<std::size_t>();
    if (j.contains("patience")) c.patience = j["patience"].get<std::size_t>();
    if (j.contains("split")) {
      const auto r = j["split"].get<std::vector<double>>();
      if (r.size() != 3) throw InvalidArgument("config: split needs 3 ratios");
      c.split = {r[0], r[1], r[2]};
    }
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("deterministic")) c.deterministic = j["deterministic"].get<bool>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
}

json train_report(const TrainResult& r, const TrainConfig& config,
                  bool include_timings) {
  json j;
  j["config"] = config_to_json(config);
  j["seed"] = config.seed;
  j["split_counts"] = {{"train", r.split.count(SplitTag::kTrain)},
                       {"val", r.split.count(SplitTag::kVal)},
                       {"test", r.split.count(SplitTag::kTest)}};
  j["epochs_run"] = r.epochs_run;
  j["best_epoch"] = r.best_epoch;
  j["best_val_acc"] = r.best_val_acc;
  j["train_acc"] = r.train_acc;
  j["test_acc"] = r.test_acc;
  j["history"] = history_json(r);
  if (include_timings) j["timings"] = timings_json(r.timings);
  return j;
}

json grid_report(const GridSearchResult& g, const TrainConfig& config,
                 bool include_timings) {
  json j;
  j["config"] = config_to_json(config);
  j["best_alpha"] = g.best_alpha;
  json entries = json::array();
  for (const auto& e : g.entries) {
    json row = {{"alpha", e.alpha}, {"failed", e.failed}};
    if (e.failed) {
      row["error"] = e.error;
    } else {
      row["mean_val_acc"] = e.mean_val_acc;
      row["mean_test_acc"] = e.mean_test_acc;
      json runs = json::array();
      for (const auto& r : e.runs) {
        json run = {{"best_epoch", r.best_epoch},
                    {"epochs_run", r.epochs_run},
                    {"best_val_acc", r.best_val_acc},
                    {"test_acc", r.test_acc}};
        if (include_timings) run["timings"] = timings_json(r.timings);
        runs.push_back(run);
      }
      row["runs"] = runs;
    }
    entries.push_back(row);
  }
  j["entries"] = entries;
  const auto& best = g.entries[g.best_index];
  j["best"] = train_report(best.runs.front(), config, include_timings);
  j["best"]["config"]["alpha"] = best.alpha;
  return j;
}

json latency_report_json(const LatencyReport& report) {
  json entries = json::array();
  for (const auto& e : report.entries) {
    entries.push_back({{"n", e.n},
                       {"m", e.m},
                       {"layers", e.depth},
                       {"d", e.input_dim},
                       {"incidences", e.incidences},
                       {"warmup", e.warmup},
                       {"runs", e.runs},
                       {"median_ms", e.median_ms},
                       {"p95_ms", e.p95_ms},
                       {"mean_ms", e.mean_ms},
                       {"min_ms", e.min_ms}});
  }
  return {{"environment", report.environment}, {"entries", entries}};
}

LatencyReport latency_report_from_json(const json& j) {
  LatencyReport r;
  try {
    r.environment = j.at("environment").get<std::string>();
    for (const auto& e : j.at("entries")) {
      LatencyEntry x;
      x.n = e.at("n").get<std::size_t>();
      x.m = e.at("m").get<std::size_t>();
      x.depth = e.at("layers").get<std::size_t>();
      x.input_dim = e.at("d").get<std::size_t>();
      x.incidences = e.value("incidences", std::size_t{0});
      x.warmup = e.at("warmup").get<std::size_t>();
      x.runs = e.at("runs").get<std::size_t>();
      x.median_ms = e.at("median_ms").get<double>();
      x.p95_ms = e.at("p95_ms").get<double>();
      x.mean_ms = e.at("mean_ms").get<double>();
      x.min_ms = e.value("min_ms", 0.0);
      r.entries.push_back(x);
    }
  } catch (const json::exception& e) {
    throw IoError(std::string("latency report: ") + e.what());
  }
  return r;
}

}  // namespace hgmlp
