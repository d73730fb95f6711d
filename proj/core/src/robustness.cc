#include "hgmlp/robustness.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>
#include <thread>

#include "hgmlp/error.h"
#include "hgmlp/trainer.h"

namespace hgmlp {
namespace {

std::vector<NodeIndex> random_members(std::size_t n, std::size_t card, Rng& rng) {
  std::vector<NodeIndex> members;
  members.reserve(card);
  for (std::size_t v : sample_without_replacement(n, card, rng)) {
    members.push_back(static_cast<NodeIndex>(v));
  }
  return members;
}

std::string shortest(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

}  // namespace

Hypergraph perturb(const Hypergraph& h, const PerturbSpec& spec) {
  if (!(spec.ratio >= 0.0) || !std::isfinite(spec.ratio)) {
    throw InvalidArgument("perturb: ratio must be finite and >= 0");
  }
  if (!spec.additive && spec.ratio > 1.0) {
    throw InvalidArgument("perturb: ratio > 1 needs additive mode");
  }
  const std::size_t n = h.num_nodes();
  const std::size_t m = h.num_edges();
  const auto k = static_cast<std::size_t>(
      std::llround(spec.ratio * static_cast<double>(m)));
  if (k == 0) return h;

  Rng rng = make_stream(spec.seed, Stream::kPerturb);
  std::vector<std::vector<NodeIndex>> edges = h.edges();
  if (spec.additive) {
    edges.reserve(m + k);
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t card = h.edge(rng.below(m)).size();
      edges.push_back(random_members(n, card, rng));
    }
  } else {
    // Partial Fisher-Yates picks the k victims.
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(m - i));
      std::swap(order[i], order[j]);
      const std::size_t victim = order[i];
      edges[victim] = random_members(n, edges[victim].size(), rng);
    }
  }
  return build_hypergraph_unchecked(n, std::move(edges));
}

Hypergraph random_hypergraph(std::size_t n, std::size_t m, std::size_t min_card,
                             std::size_t max_card, Rng& rng) {
  if (n == 0 || min_card == 0 || min_card > max_card || max_card > n) {
    throw InvalidArgument("random_hypergraph: infeasible cardinality range");
  }
  std::vector<std::vector<NodeIndex>> edges;
  edges.reserve(m);
  const std::size_t span = max_card - min_card + 1;
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t card = min_card + static_cast<std::size_t>(rng.below(span));
    edges.push_back(random_members(n, card, rng));
  }
  return build_hypergraph_unchecked(n, std::move(edges));
}

SweepResult robustness_sweep(const ModelParams& params, const Dataset& dataset,
                             std::span<const std::size_t> eval_nodes,
                             std::span<const double> ratios,
                             std::span<const std::uint64_t> seeds,
                             bool additive) {
  dataset.validate();
  const Prediction clean = predict(params, dataset.features);
  SweepResult result;
  result.clean_accuracy = evaluate(clean.classes, dataset.labels, eval_nodes);
  result.constant = true;
  const Hypergraph& original = dataset.hypergraph;
  for (double ratio : ratios) {
    for (std::uint64_t seed : seeds) {
      const Hypergraph perturbed = perturb(original, {ratio, seed, additive});
      SweepCell cell;
      cell.ratio = ratio;
      cell.seed = seed;
      for (std::size_t j = 0; j < perturbed.num_edges(); ++j) {
        if (j >= original.num_edges() || perturbed.edges()[j] != original.edges()[j]) {
          ++cell.edges_changed;
        }
      }
      // The perturbed structure is in scope here, but predict() has no
      // parameter through which it could be consumed.
      const Prediction pred = predict(params, dataset.features);
      cell.logits_identical = bitwise_equal(pred.probs, clean.probs);
      cell.accuracy = evaluate(pred.classes, dataset.labels, eval_nodes);
      result.constant = result.constant && cell.logits_identical &&
                        cell.accuracy == result.clean_accuracy;
      result.cells.push_back(cell);
    }
  }
  return result;
}

void write_sweep_csv(const SweepResult& sweep, std::ostream& out) {
  out << "ratio,seed,accuracy\n";
  for (const auto& c : sweep.cells) {
    out << shortest(c.ratio) << ',' << c.seed << ',' << shortest(c.accuracy)
        << '\n';
  }
}

TimingSummary summarize_timings(std::vector<double> samples_ms) {
  if (samples_ms.empty()) throw InvalidArgument("summarize_timings: no samples");
  std::sort(samples_ms.begin(), samples_ms.end());
  auto rank = [&](double q) {
    const auto idx = static_cast<std::size_t>(
        std::ceil(q * static_cast<double>(samples_ms.size())));
    return samples_ms[std::clamp<std::size_t>(idx, 1, samples_ms.size()) - 1];
  };
  TimingSummary s;
  s.median_ms = rank(0.5);
  s.p95_ms = rank(0.95);
  s.min_ms = samples_ms.front();
  s.mean_ms = std::accumulate(samples_ms.begin(), samples_ms.end(), 0.0) /
              static_cast<double>(samples_ms.size());
  return s;
}

std::string describe_environment() {
  std::string env = "hardware_threads=" +
                    std::to_string(std::thread::hardware_concurrency()) +
                    "; timed_threads=1; clock=steady_clock";
#if defined(__clang__)
  env += "; compiler=clang " __clang_version__;
#elif defined(__GNUC__)
  env += "; compiler=gcc " __VERSION__;
#endif
#ifdef NDEBUG
  env += "; build=release";
#else
  env += "; build=debug";
#endif
  return env;
}

LatencyReport latency_bench(const ModelParams& params,
                            std::span<const std::size_t> n_values,
                            std::span<const std::size_t> m_values,
                            const LatencyOptions& options) {
  params.validate();
  if (options.repeat < kMinLatencyRuns || options.warmup < kMinLatencyWarmup) {
    throw InvalidArgument("latency_bench: need >= " +
                          std::to_string(kMinLatencyRuns) + " runs and >= " +
                          std::to_string(kMinLatencyWarmup) + " warmup calls");
  }
  if (options.block == 0) throw InvalidArgument("latency_bench: block must be > 0");

  struct Config {
    LatencyEntry entry;
    Matrix x;
    std::vector<double> samples;
  };
  std::vector<Config> configs;
  Rng rng = make_stream(options.seed, Stream::kBenchmark);
  for (std::size_t n : n_values) {
    if (n == 0) throw InvalidArgument("latency_bench: n must be positive");
    Matrix x = gaussian_features(n, params.input_dim(), 1.0, rng.next_u64());
    for (std::size_t m : m_values) {
      const Hypergraph h =
          random_hypergraph(n, m, std::min<std::size_t>(2, n),
                            std::min<std::size_t>(6, n), rng);
      Config c;
      c.entry.n = n;
      c.entry.m = m;
      c.entry.depth = params.depth();
      c.entry.input_dim = params.input_dim();
      c.entry.incidences = h.incidence_count();
      c.entry.warmup = options.warmup;
      c.entry.runs = options.repeat;
      c.x = x;
      c.samples.reserve(options.repeat);
      configs.push_back(std::move(c));
    }
  }

  using Clock = std::chrono::steady_clock;
  volatile double sink = 0.0;
  for (auto& c : configs) {
    for (std::size_t i = 0; i < options.warmup; ++i) {
      sink = sink + predict(params, c.x).probs(0, 0);
    }
  }
  bool pending = true;
  while (pending) {
    pending = false;
    for (auto& c : configs) {
      const std::size_t todo =
          std::min(options.block, options.repeat - c.samples.size());
      for (std::size_t i = 0; i < todo; ++i) {
        const auto start = Clock::now();
        const Prediction p = predict(params, c.x);
        const auto stop = Clock::now();
        sink = sink + p.probs(0, 0);
        c.samples.push_back(
            std::chrono::duration<double, std::milli>(stop - start).count());
      }
      pending = pending || c.samples.size() < options.repeat;
    }
  }

  LatencyReport report;
  report.environment = describe_environment();
  for (auto& c : configs) {
    const TimingSummary s = summarize_timings(std::move(c.samples));
    c.entry.median_ms = s.median_ms;
    c.entry.p95_ms = s.p95_ms;
    c.entry.mean_ms = s.mean_ms;
    c.entry.min_ms = s.min_ms;
    report.entries.push_back(c.entry);
  }
  return report;
}

double mean_pairwise_distance(const Matrix& z) {
  const std::size_t n = z.rows();
  if (n < 2) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      total += std::sqrt(squared_distance(z.row(i), z.row(j)));
    }
  }
  return total / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
}

std::vector<double> embedding_spread(const ModelParams& params, const Matrix& x,
                                     std::span<const std::size_t> depths) {
  for (std::size_t d : depths) {
    if (d > params.depth()) {
      throw InvalidArgument("embedding_spread: depth " + std::to_string(d) +
                            " exceeds model depth " +
                            std::to_string(params.depth()));
    }
  }
  const std::vector<Matrix> outputs = mlp_layer_outputs(params, x);
  std::vector<double> spread;
  spread.reserve(depths.size());
  for (std::size_t d : depths) {
    spread.push_back(mean_pairwise_distance(d == 0 ? x : outputs[d - 1]));
  }
  return spread;
}

}  // namespace hgmlp
