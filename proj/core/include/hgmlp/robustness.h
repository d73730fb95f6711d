#ifndef HGMLP_ROBUSTNESS_H_
#define HGMLP_ROBUSTNESS_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hgmlp/dataset.h"
#include "hgmlp/hypergraph.h"
#include "hgmlp/nn.h"
#include "hgmlp/rng.h"

namespace hgmlp {

// ---------------------------------------------------------------------------
// Structural perturbation
// ---------------------------------------------------------------------------

struct PerturbSpec {
  double ratio = 0.0;  // fake hyperedges / original hyperedges
  std::uint64_t seed = 0;
  // Append fakes instead of replacing originals; allows ratio > 1.
  bool additive = false;
};

// Replacement mode: k = round(ratio * m) hyperedges, chosen uniformly
// without replacement, are each replaced by a fake hyperedge of the same
// cardinality whose members are drawn uniformly without replacement from
// all n nodes. n and m are unchanged. Additive mode appends k such fakes,
// each copying the cardinality of a uniformly chosen original hyperedge.
Hypergraph perturb(const Hypergraph& h, const PerturbSpec& spec);

// m hyperedges with cardinality uniform in [min_card, max_card] and members
// uniform over all nodes.
Hypergraph random_hypergraph(std::size_t n, std::size_t m,
                             std::size_t min_card, std::size_t max_card,
                             Rng& rng);

struct SweepCell {
  double ratio = 0.0;
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  std::size_t edges_changed = 0;  // hyperedges that differ from the original
  bool logits_identical = false;  // bitwise equal to the clean prediction
};

struct SweepResult {
  double clean_accuracy = 0.0;
  std::vector<SweepCell> cells;  // ratio-major
  // Every cell reproduced the clean logits bit for bit.
  bool constant = false;
};

// For each ratio x seed: perturb the dataset's hypergraph, predict, and
// score on eval_nodes.
SweepResult robustness_sweep(const ModelParams& params, const Dataset& dataset,
                             std::span<const std::size_t> eval_nodes,
                             std::span<const double> ratios,
                             std::span<const std::uint64_t> seeds,
                             bool additive = false);

// "ratio,seed,accuracy" with a header line.
void write_sweep_csv(const SweepResult& sweep, std::ostream& out);

// ---------------------------------------------------------------------------
// Inference latency
// ---------------------------------------------------------------------------

struct LatencyEntry {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t depth = 0;
  std::size_t input_dim = 0;
  std::size_t incidences = 0;  // of the generated (unused) hypergraph
  std::size_t warmup = 0;
  std::size_t runs = 0;
  double median_ms = 0.0;
  double p95_ms = 0.0;
  double mean_ms = 0.0;
  double min_ms = 0.0;
};

struct LatencyReport {
  std::vector<LatencyEntry> entries;
  std::string environment;
};

struct LatencyOptions {
  std::size_t repeat = 1000;
  std::size_t warmup = 100;
  std::size_t block = 50;  // runs per config before rotating to the next
  std::uint64_t seed = 0;
};

inline constexpr std::size_t kMinLatencyRuns = 1000;
inline constexpr std::size_t kMinLatencyWarmup = 100;

// Times predict() over the n x m grid on synthetic inputs. Hypergraphs of
// m hyperedges are generated alongside the features, but predict never
// sees them. Configurations are measured in interleaved blocks so slow
// drift of the machine affects all of them alike. Throws InvalidArgument
// when repeat < 1000 or warmup < 100.
LatencyReport latency_bench(const ModelParams& params,
                            std::span<const std::size_t> n_values,
                            std::span<const std::size_t> m_values,
                            const LatencyOptions& options = {});

struct TimingSummary {
  double median_ms = 0.0;
  double p95_ms = 0.0;
  double mean_ms = 0.0;
  double min_ms = 0.0;
};

// Nearest-rank percentiles over raw samples (milliseconds).
TimingSummary summarize_timings(std::vector<double> samples_ms);

std::string describe_environment();

// ---------------------------------------------------------------------------
// Oversmoothing diagnostic
// ---------------------------------------------------------------------------

// Mean pairwise Euclidean distance between node rows at each probed depth,
// in inference mode. Depth 0 is the input features, depth l the output of
// layer l. Throws InvalidArgument for a depth beyond the model.
std::vector<double> embedding_spread(const ModelParams& params, const Matrix& x,
                                     std::span<const std::size_t> depths);

double mean_pairwise_distance(const Matrix& z);

}  // namespace hgmlp

#endif  // HGMLP_ROBUSTNESS_H_
