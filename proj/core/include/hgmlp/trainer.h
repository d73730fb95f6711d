#ifndef HGMLP_TRAINER_H_
#define HGMLP_TRAINER_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hgmlp/dataset.h"
#include "hgmlp/hypergraph.h"
#include "hgmlp/loss.h"
#include "hgmlp/matrix.h"
#include "hgmlp/nn.h"
#include "hgmlp/optim.h"
#include "hgmlp/rng.h"

namespace hgmlp {

enum class OptimizerKind { kAdam, kSgd };

// kOverall minimizes ce + alpha * smooth. kCrossEntropyOnly is the plain
// MLP baseline: the smoothness term is still evaluated and reported, but it
// never reaches the gradient.
enum class Objective { kOverall, kCrossEntropyOnly };

struct SplitRatios {
  double train = 0.5;
  double val = 0.25;
  double test = 0.25;
};

struct TrainConfig {
  std::vector<std::size_t> hidden = {256, 256};  // one width per layer
  double dropout = 0.5;
  double ln_eps = 1e-5;
  double alpha = 0.0;
  Objective objective = Objective::kOverall;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  AdamOptions adam;  // adam.lr doubles as the SGD learning rate
  std::size_t epochs = 500;
  std::size_t patience = 100;
  SplitRatios split;
  std::uint64_t seed = 0;
  bool deterministic = true;

  std::size_t depth() const { return hidden.size(); }
  void validate() const;
};

enum class SplitTag : std::uint8_t { kTrain, kVal, kTest };

struct SplitAssignment {
  std::vector<SplitTag> tags;

  std::vector<std::size_t> nodes(SplitTag tag) const;
  // Nodes with this tag and a known label.
  std::vector<std::size_t> labeled_nodes(SplitTag tag,
                                         std::span<const int> labels) const;
  std::size_t count(SplitTag tag) const;
  friend bool operator==(const SplitAssignment&, const SplitAssignment&) = default;
};

// Uniform random partition with floor(n * r) nodes for val and test and the
// remainder for train. Throws InvalidArgument for n < 3 or bad ratios.
SplitAssignment split(std::size_t n, const SplitRatios& ratios, Rng& rng);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  LossBreakdown loss;
  double train_acc = 0.0;
  double val_acc = 0.0;
};

struct PhaseTimings {
  double init_seconds = 0.0;
  double train_seconds = 0.0;
  double eval_seconds = 0.0;
};

struct TrainResult {
  ModelParams best_params;
  std::vector<EpochRecord> history;
  std::size_t epochs_run = 0;
  std::size_t best_epoch = 0;
  double best_val_acc = 0.0;
  double train_acc = 0.0;  // of best_params
  double test_acc = 0.0;   // of best_params
  SplitAssignment split;
  PhaseTimings timings;
};

// Full-batch training: forward in training mode, loss on the labeled train
// nodes plus alpha times the smoothness loss over all nodes, backward,
// optimizer step. Keeps the parameters with the best validation accuracy
// (earliest on ties) and stops after `patience` epochs without improvement.
// Throws NumericalError if the loss becomes non-finite.
TrainResult train(const Dataset& dataset, const Hypergraph& hypergraph,
                  const TrainConfig& config);
// Same, with a caller-provided split instead of one drawn from the seed.
TrainResult train(const Dataset& dataset, const Hypergraph& hypergraph,
                  const TrainConfig& config, const SplitAssignment& assignment);

struct Prediction {
  Matrix probs;  // n x c, rows sum to 1
  std::vector<int> classes;
};

// Inference needs only the features and the parameters.
Prediction predict(const ModelParams& params, const Matrix& x);

// Fraction of `nodes` whose prediction equals the label. Throws
// InvalidArgument for an empty node set.
double evaluate(std::span<const int> predicted, std::span<const int> labels,
                std::span<const std::size_t> nodes);

inline const std::vector<double> kDefaultAlphaGrid = {0.01, 0.05, 0.1, 0.5,
                                                      1.0,  5.0,  10.0};

struct GridEntry {
  double alpha = 0.0;
  bool failed = false;
  std::string error;
  double mean_val_acc = 0.0;
  double mean_test_acc = 0.0;
  std::vector<TrainResult> runs;  // one per seed
};

struct GridSearchResult {
  double best_alpha = 0.0;
  std::size_t best_index = 0;
  std::vector<GridEntry> entries;
};

// Trains once per (alpha, seed) with config.alpha replaced, then picks the
// alpha with the highest mean validation accuracy (smaller alpha on ties).
// Entries whose training diverges are marked failed and skipped. Throws
// NumericalError if every entry failed. `seeds` defaults to {config.seed}.
GridSearchResult grid_search_alpha(const Dataset& dataset,
                                   const Hypergraph& hypergraph,
                                   const TrainConfig& config,
                                   std::span<const double> grid,
                                   std::span<const std::uint64_t> seeds = {});

}  // namespace hgmlp

#endif  // HGMLP_TRAINER_H_
