#include "hgmlp/trainer.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <numeric>
#include <string>
#include <thread>
#include <utility>

#include "hgmlp/error.h"

namespace hgmlp {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<int> argmax_rows(const Matrix& probs) {
  std::vector<int> classes(probs.rows());
  for (std::size_t i = 0; i < probs.rows(); ++i) {
    const auto row = probs.row(i);
    classes[i] = static_cast<int>(
        std::max_element(row.begin(), row.end()) - row.begin());
  }
  return classes;
}

void add_scaled(Matrix& dst, const Matrix& src, double scale) {
  auto d = dst.data();
  const auto s = src.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += scale * s[i];
}

}  // namespace

void TrainConfig::validate() const {
  if (hidden.empty()) throw InvalidArgument("config: need at least one layer (L >= 1)");
  for (std::size_t w : hidden) {
    if (w == 0) throw InvalidArgument("config: layer width must be positive");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw InvalidArgument("config: dropout must be in [0, 1)");
  }
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw InvalidArgument("config: alpha must be finite and >= 0");
  }
  if (!(adam.lr > 0.0)) throw InvalidArgument("config: learning rate must be > 0");
  if (epochs == 0) throw InvalidArgument("config: epochs must be positive");
  if (patience == 0 || patience > epochs) {
    throw InvalidArgument("config: patience must be in [1, epochs]");
  }
  if (!(split.train > 0.0 && split.val > 0.0 && split.test > 0.0) ||
      std::abs(split.train + split.val + split.test - 1.0) > 1e-9) {
    throw InvalidArgument("config: split ratios must be positive and sum to 1");
  }
}

std::vector<std::size_t> SplitAssignment::nodes(SplitTag tag) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (tags[i] == tag) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> SplitAssignment::labeled_nodes(
    SplitTag tag, std::span<const int> labels) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (tags[i] == tag && labels[i] >= 0) out.push_back(i);
  }
  return out;
}

std::size_t SplitAssignment::count(SplitTag tag) const {
  return static_cast<std::size_t>(std::count(tags.begin(), tags.end(), tag));
}

SplitAssignment split(std::size_t n, const SplitRatios& ratios, Rng& rng) {
  if (n < 3) throw InvalidArgument("split: need at least 3 nodes");
  if (!(ratios.train > 0.0 && ratios.val > 0.0 && ratios.test > 0.0) ||
      std::abs(ratios.train + ratios.val + ratios.test - 1.0) > 1e-9) {
    throw InvalidArgument("split: ratios must be positive and sum to 1");
  }
  const double nd = static_cast<double>(n);
  const auto n_val = static_cast<std::size_t>(std::floor(nd * ratios.val));
  const auto n_test = static_cast<std::size_t>(std::floor(nd * ratios.test));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(order));

  SplitAssignment s;
  s.tags.assign(n, SplitTag::kTrain);
  for (std::size_t i = 0; i < n_val; ++i) s.tags[order[i]] = SplitTag::kVal;
  for (std::size_t i = n_val; i < n_val + n_test; ++i) {
    s.tags[order[i]] = SplitTag::kTest;
  }
  return s;
}

TrainResult train(const Dataset& dataset, const Hypergraph& hypergraph,
                  const TrainConfig& config) {
  config.validate();
  Rng split_rng = make_stream(config.seed, Stream::kSplit);
  return train(dataset, hypergraph, config,
               split(dataset.num_nodes(), config.split, split_rng));
}

TrainResult train(const Dataset& dataset, const Hypergraph& hypergraph,
                  const TrainConfig& config, const SplitAssignment& assignment) {
  const auto init_start = Clock::now();
  config.validate();
  dataset.validate();
  const std::size_t n = dataset.num_nodes();
  if (hypergraph.num_nodes() != n) {
    throw InvalidArgument("hypergraph has " +
                          std::to_string(hypergraph.num_nodes()) +
                          " nodes, dataset has " + std::to_string(n));
  }
  if (assignment.tags.size() != n) {
    throw InvalidArgument("split does not cover the dataset's nodes");
  }
  const std::span<const int> labels = dataset.labels;
  const auto train_nodes = assignment.labeled_nodes(SplitTag::kTrain, labels);
  const auto val_nodes = assignment.labeled_nodes(SplitTag::kVal, labels);
  const auto test_nodes = assignment.labeled_nodes(SplitTag::kTest, labels);
  if (train_nodes.empty()) throw InvalidArgument("train split has no labeled node");
  // Without validation labels, selection falls back to training accuracy.
  const auto& select_nodes = val_nodes.empty() ? train_nodes : val_nodes;

  Rng init_rng = make_stream(config.seed, Stream::kInit);
  Rng dropout_rng = make_stream(config.seed, Stream::kDropout);
  ModelParams params = init_params(
      {dataset.feature_dim(), config.hidden,
       static_cast<std::size_t>(dataset.num_classes), config.dropout,
       config.ln_eps},
      init_rng);
  AdamState adam_state;
  if (config.optimizer == OptimizerKind::kAdam) {
    adam_state = AdamState::for_tensors(params.tensors());
  }
  const double alpha =
      config.objective == Objective::kOverall ? config.alpha : 0.0;

  TrainResult result;
  result.split = assignment;
  result.best_params = params;
  result.best_val_acc = -1.0;
  result.timings.init_seconds = seconds_since(init_start);

  std::size_t since_best = 0;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto step_start = Clock::now();
    ForwardResult fwd = mlp_forward(params, dataset.features, &dropout_rng, true);
    const Matrix logits = matmul(fwd.embeddings, params.head);
    CrossEntropyResult ce = cross_entropy(logits, labels, train_nodes);
    SmoothnessResult smooth = smoothness_loss(fwd.embeddings, hypergraph);
    const LossBreakdown loss = overall_loss(ce.value, smooth.value, alpha);
    if (!std::isfinite(loss.total)) {
      throw NumericalError("non-finite loss at epoch " + std::to_string(epoch) +
                           " (ce=" + std::to_string(loss.ce) +
                           ", smooth=" + std::to_string(loss.smooth) +
                           ", alpha=" + std::to_string(loss.alpha) + ")");
    }

    ModelGrads grads;
    grads.head = matmul_at_b(fwd.embeddings, ce.dlogits);
    Matrix d_embed = matmul_a_bt(ce.dlogits, params.head);
    if (config.objective == Objective::kOverall) {
      add_scaled(d_embed, smooth.gradient, alpha);
    }
    MlpBackward back = mlp_backward(params, fwd.cache, d_embed);
    grads.layers = std::move(back.layers);

    const auto grad_views = std::as_const(grads).tensors();
    for (const auto& g : grad_views) {
      for (double v : g) {
        if (!std::isfinite(v)) {
          throw NumericalError("non-finite gradient at epoch " +
                               std::to_string(epoch));
        }
      }
    }
    const auto param_views = params.tensors();
    if (config.optimizer == OptimizerKind::kAdam) {
      adam_step(param_views, grad_views, adam_state, config.adam);
    } else {
      sgd_step(param_views, grad_views, config.adam.lr);
    }
    result.timings.train_seconds += seconds_since(step_start);

    const auto eval_start = Clock::now();
    const Prediction pred = predict(params, dataset.features);
    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss = loss;
    rec.train_acc = evaluate(pred.classes, labels, train_nodes);
    rec.val_acc = evaluate(pred.classes, labels, select_nodes);
    result.history.push_back(rec);
    result.epochs_run = epoch;
    if (rec.val_acc > result.best_val_acc) {
      result.best_val_acc = rec.val_acc;
      result.best_epoch = epoch;
      result.best_params = params;
      since_best = 0;
    } else {
      ++since_best;
    }
    result.timings.eval_seconds += seconds_since(eval_start);
    if (since_best >= config.patience) break;
  }

  const auto final_start = Clock::now();
  const Prediction best = predict(result.best_params, dataset.features);
  result.train_acc = evaluate(best.classes, labels, train_nodes);
  result.test_acc =
      test_nodes.empty() ? 0.0 : evaluate(best.classes, labels, test_nodes);
  result.timings.eval_seconds += seconds_since(final_start);
  return result;
}

Prediction predict(const ModelParams& params, const Matrix& x) {
  Prediction p;
  p.probs = head_forward(mlp_embed(params, x), params.head);
  p.classes = argmax_rows(p.probs);
  return p;
}

double evaluate(std::span<const int> predicted, std::span<const int> labels,
                std::span<const std::size_t> nodes) {
  if (nodes.empty()) throw InvalidArgument("evaluate: empty node set");
  if (predicted.size() != labels.size()) {
    throw InvalidArgument("evaluate: prediction/label length mismatch");
  }
  std::size_t correct = 0;
  for (std::size_t v : nodes) {
    if (v >= labels.size()) throw InvalidArgument("evaluate: node out of range");
    if (predicted[v] == labels[v]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(nodes.size());
}

GridSearchResult grid_search_alpha(const Dataset& dataset,
                                   const Hypergraph& hypergraph,
                                   const TrainConfig& config,
                                   std::span<const double> grid,
                                   std::span<const std::uint64_t> seeds) {
  if (grid.empty()) throw InvalidArgument("grid_search_alpha: empty grid");
  config.validate();
  const std::vector<std::uint64_t> seed_list =
      seeds.empty() ? std::vector<std::uint64_t>{config.seed}
                    : std::vector<std::uint64_t>(seeds.begin(), seeds.end());

  auto run_entry = [&](double alpha) {
    GridEntry entry;
    entry.alpha = alpha;
    try {
      TrainConfig trial = config;
      trial.alpha = alpha;
      trial.objective = Objective::kOverall;
      for (std::uint64_t seed : seed_list) {
        trial.seed = seed;
        entry.runs.push_back(train(dataset, hypergraph, trial));
      }
    } catch (const NumericalError& e) {
      entry.failed = true;
      entry.error = e.what();
      entry.runs.clear();
      return entry;
    }
    for (const auto& r : entry.runs) {
      entry.mean_val_acc += r.best_val_acc;
      entry.mean_test_acc += r.test_acc;
    }
    entry.mean_val_acc /= static_cast<double>(entry.runs.size());
    entry.mean_test_acc /= static_cast<double>(entry.runs.size());
    return entry;
  };

  GridSearchResult result;
  result.entries.resize(grid.size());
  const bool parallel =
      !config.deterministic && std::thread::hardware_concurrency() > 1;
  if (parallel) {
    // Trials own their parameters and random streams, so results do not
    // depend on scheduling.
    std::vector<std::future<GridEntry>> pending;
    for (double alpha : grid) {
      pending.push_back(std::async(std::launch::async, run_entry, alpha));
    }
    for (std::size_t i = 0; i < pending.size(); ++i) {
      result.entries[i] = pending[i].get();
    }
  } else {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      result.entries[i] = run_entry(grid[i]);
    }
  }

  bool found = false;
  for (std::size_t i = 0; i < result.entries.size(); ++i) {
    const auto& e = result.entries[i];
    if (e.failed) continue;
    const auto& best = result.entries[result.best_index];
    if (!found || e.mean_val_acc > best.mean_val_acc ||
        (e.mean_val_acc == best.mean_val_acc && e.alpha < best.alpha)) {
      result.best_index = i;
      found = true;
    }
  }
  if (!found) throw NumericalError("grid_search_alpha: every grid entry diverged");
  result.best_alpha = result.entries[result.best_index].alpha;
  return result;
}

}  // namespace hgmlp
