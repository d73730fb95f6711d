#include "hgmlp/robustness.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "hgmlp/error.h"
#include "hgmlp/trainer.h"
#include "oracles.h"

namespace hgmlp {
namespace {

std::vector<std::size_t> cardinalities(const Hypergraph& h) {
  std::vector<std::size_t> c;
  for (const auto& e : h.edges()) c.push_back(e.size());
  std::sort(c.begin(), c.end());
  return c;
}

std::size_t changed(const Hypergraph& a, const Hypergraph& b) {
  std::size_t k = 0;
  for (std::size_t j = 0; j < a.num_edges(); ++j) {
    k += !std::ranges::equal(a.edge(j), b.edge(j));
  }
  return k;
}

Hypergraph ten_edges() {
  Rng rng(1);
  return random_hypergraph(200, 10, 3, 6, rng);
}

TEST(PerturbTest, ZeroRatioIsIdentity) {
  const Hypergraph h = ten_edges();
  EXPECT_EQ(perturb(h, {0.0, 5, false}), h);
}

TEST(PerturbTest, HalfReplacesExactlyFive) {
  const Hypergraph h = ten_edges();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Hypergraph p = perturb(h, {0.5, seed, false});
    EXPECT_EQ(p.num_nodes(), h.num_nodes());
    EXPECT_EQ(p.num_edges(), 10u);
    // A fake may coincide with its original only with negligible probability
    // on 200 nodes.
    EXPECT_EQ(changed(h, p), 5u);
    EXPECT_EQ(cardinalities(p), cardinalities(h));
  }
}

TEST(PerturbTest, FullRatioPreservesCardinalities) {
  const Hypergraph h = ten_edges();
  const Hypergraph p = perturb(h, {1.0, 3, false});
  EXPECT_EQ(changed(h, p), 10u);
  for (std::size_t j = 0; j < h.num_edges(); ++j) {
    EXPECT_EQ(p.edge(j).size(), h.edge(j).size());
  }
}

TEST(PerturbTest, DeterministicPerSeed) {
  const Hypergraph h = ten_edges();
  EXPECT_EQ(perturb(h, {0.3, 4, false}), perturb(h, {0.3, 4, false}));
  EXPECT_NE(perturb(h, {0.3, 4, false}), perturb(h, {0.3, 5, false}));
}

TEST(PerturbTest, AdditiveMode) {
  const Hypergraph h = ten_edges();
  const Hypergraph p = perturb(h, {2.0, 6, true});
  EXPECT_EQ(p.num_edges(), 30u);
  for (std::size_t j = 0; j < 10; ++j) {
    EXPECT_TRUE(std::ranges::equal(p.edge(j), h.edge(j)));
  }
}

TEST(PerturbTest, InvalidRatios) {
  const Hypergraph h = ten_edges();
  EXPECT_THROW(perturb(h, {1.5, 0, false}), InvalidArgument);
  EXPECT_THROW(perturb(h, {-0.1, 0, false}), InvalidArgument);
  EXPECT_THROW(perturb(h, {std::nan(""), 0, true}), InvalidArgument);
}

class SweepTest : public ::testing::Test {
 protected:
  void SetUp() override {
    ds_ = synth_generate({.n = 150, .m = 80, .feature_dim = 6, .seed = 2});
    TrainConfig cfg;
    cfg.hidden = {8};
    cfg.epochs = 30;
    cfg.patience = 30;
    cfg.adam.lr = 0.01;
    cfg.alpha = 0.1;
    result_ = train(ds_, ds_.hypergraph, cfg);
  }
  Dataset ds_;
  TrainResult result_;
};

TEST_F(SweepTest, ConstantAcrossRatiosAndSeeds) {
  const auto test_nodes = result_.split.labeled_nodes(SplitTag::kTest, ds_.labels);
  const std::vector<double> ratios = {0.0, 0.25, 0.5, 1.0};
  const std::vector<std::uint64_t> seeds = {1, 2, 3};
  const SweepResult s = robustness_sweep(result_.best_params, ds_, test_nodes,
                                         ratios, seeds);
  EXPECT_TRUE(s.constant);
  ASSERT_EQ(s.cells.size(), 12u);
  EXPECT_EQ(s.clean_accuracy, result_.test_acc);
  for (const auto& c : s.cells) {
    EXPECT_TRUE(c.logits_identical);
    EXPECT_EQ(c.accuracy, s.clean_accuracy);
    EXPECT_GE(c.accuracy, 0.0);
    EXPECT_LE(c.accuracy, 1.0);
    if (c.ratio == 0.0) EXPECT_EQ(c.edges_changed, 0u);
  }

  std::ostringstream csv;
  write_sweep_csv(s, csv);
  const std::string text = csv.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "ratio,seed,accuracy");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 13);
}

TEST(TimingSummaryTest, NearestRank) {
  std::vector<double> s(100);
  for (std::size_t i = 0; i < 100; ++i) s[i] = static_cast<double>(100 - i);
  const TimingSummary t = summarize_timings(s);
  EXPECT_EQ(t.median_ms, 50.0);
  EXPECT_EQ(t.p95_ms, 95.0);
  EXPECT_EQ(t.min_ms, 1.0);
  EXPECT_DOUBLE_EQ(t.mean_ms, 50.5);
  EXPECT_LE(t.median_ms, t.p95_ms);
  EXPECT_THROW(summarize_timings({}), InvalidArgument);
}

TEST(LatencyBenchTest, EnforcesMinimumRuns) {
  Rng rng(1);
  const ModelParams p = init_params({4, {4}, 2, 0.0, 1e-5}, rng);
  const std::vector<std::size_t> n = {10};
  const std::vector<std::size_t> m = {5};
  EXPECT_THROW(latency_bench(p, n, m, {.repeat = 999}), InvalidArgument);
  EXPECT_THROW(latency_bench(p, n, m, {.warmup = 99}), InvalidArgument);
}

TEST(LatencyBenchTest, SmallGrid) {
  Rng rng(2);
  const ModelParams p = init_params({4, {4}, 2, 0.0, 1e-5}, rng);
  const std::vector<std::size_t> n = {10, 20};
  const std::vector<std::size_t> m = {5, 50};
  const LatencyReport r = latency_bench(p, n, m, {});
  ASSERT_EQ(r.entries.size(), 4u);
  for (const auto& e : r.entries) {
    EXPECT_EQ(e.runs, 1000u);
    EXPECT_EQ(e.warmup, 100u);
    EXPECT_LE(e.median_ms, e.p95_ms);
    EXPECT_GT(e.incidences, 0u);
  }
  EXPECT_FALSE(r.environment.empty());
}

TEST(SpreadTest, IdenticalRowsHaveZeroSpread) {
  Rng rng(3);
  const ModelParams p = init_params({5, {6, 6, 6}, 3, 0.5, 1e-5}, rng);
  const Matrix x(20, 5, 0.7);
  const std::vector<std::size_t> depths = {0, 1, 2, 3};
  for (double s : embedding_spread(p, x, depths)) EXPECT_EQ(s, 0.0);
}

TEST(SpreadTest, NonNegativeAndDeepNetworkKeepsSpread) {
  Rng rng(4);
  std::vector<std::size_t> hidden(32, 16);
  const ModelParams p = init_params({10, hidden, 3, 0.5, 1e-5}, rng);
  std::mt19937_64 gen(5);
  const Matrix x = testing::random_matrix(50, 10, gen);
  std::vector<std::size_t> depths(33);
  for (std::size_t i = 0; i < depths.size(); ++i) depths[i] = i;
  const auto spread = embedding_spread(p, x, depths);
  for (double s : spread) EXPECT_GE(s, 0.0);
  EXPECT_GT(spread.back(), 0.0);
  const std::vector<std::size_t> too_deep = {33};
  EXPECT_THROW(embedding_spread(p, x, too_deep), InvalidArgument);
}

TEST(SpreadTest, PairwiseDistance) {
  EXPECT_DOUBLE_EQ(mean_pairwise_distance(Matrix::from_rows({{0, 0}, {3, 4}})), 5.0);
  EXPECT_EQ(mean_pairwise_distance(Matrix::from_rows({{1, 1}})), 0.0);
}

}  // namespace
}  // namespace hgmlp
