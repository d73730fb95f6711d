#include "hgmlp/loss.h"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "hgmlp/error.h"
#include "hgmlp/nn.h"
#include "oracles.h"

namespace hgmlp {
namespace {

using testing::brute_force_smoothness;
using testing::random_matrix;
using testing::random_test_hypergraph;

TEST(SmoothnessLossTest, SinglePair) {
  const Hypergraph h = build_hypergraph(2, {{0, 1}});
  const auto r = smoothness_loss(Matrix::from_rows({{0, 0}, {3, 4}}), h);
  EXPECT_DOUBLE_EQ(r.value, 25.0);
  ASSERT_TRUE(r.argmax_pairs[0].has_value());
  EXPECT_EQ(*r.argmax_pairs[0], (NodePair{0, 1}));
  // +2(z0 - z1)/m at 0, the negative at 1.
  EXPECT_DOUBLE_EQ(r.gradient(0, 0), -6.0);
  EXPECT_DOUBLE_EQ(r.gradient(0, 1), -8.0);
  EXPECT_DOUBLE_EQ(r.gradient(1, 0), 6.0);
  EXPECT_DOUBLE_EQ(r.gradient(1, 1), 8.0);
}

TEST(SmoothnessLossTest, TwoEdgesAverage) {
  const Hypergraph h = build_hypergraph(3, {{0, 1}, {0, 2}});
  const auto r = smoothness_loss(Matrix::from_rows({{0, 0}, {2, 0}, {0, 4}}), h);
  EXPECT_DOUBLE_EQ(r.value, 10.0);
}

TEST(SmoothnessLossTest, IdenticalRowsGiveZero) {
  std::mt19937_64 gen(3);
  const Hypergraph h = random_test_hypergraph(10, 8, 5, gen);
  Matrix z(10, 3, 1.5);
  const auto r = smoothness_loss(z, h);
  EXPECT_EQ(r.value, 0.0);
  for (double g : r.gradient.data()) EXPECT_EQ(g, 0.0);
}

TEST(SmoothnessLossTest, SingletonAndEmptyEdgeSet) {
  const Hypergraph h = build_hypergraph(2, {{1}});
  const auto r = smoothness_loss(Matrix::from_rows({{0.0}, {5.0}}), h);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_FALSE(r.argmax_pairs[0].has_value());

  const Hypergraph empty = build_hypergraph(2, {});
  const auto e = smoothness_loss(Matrix::from_rows({{0.0}, {5.0}}), empty);
  EXPECT_EQ(e.value, 0.0);
}

TEST(SmoothnessLossTest, TiesGoToSmallestPair) {
  // Square corners: (0,2) and (1,3) are both diagonals of length^2 2.
  const Hypergraph h = build_hypergraph(4, {{3, 2, 1, 0}});
  const Matrix z = Matrix::from_rows({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  const auto r = smoothness_loss(z, h);
  EXPECT_DOUBLE_EQ(r.value, 2.0);
  EXPECT_EQ(*r.argmax_pairs[0], (NodePair{0, 2}));
  EXPECT_EQ(r.gradient(1, 0), 0.0);
  EXPECT_EQ(r.gradient(3, 1), 0.0);
}

TEST(SmoothnessLossTest, RowMismatchThrows) {
  const Hypergraph h = build_hypergraph(3, {{0, 1}});
  EXPECT_THROW(smoothness_loss(Matrix(2, 2), h), InvalidArgument);
}

TEST(SmoothnessLossTest, MatchesExhaustiveEnumerationExactly) {
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + gen() % 20;
    const Hypergraph h = random_test_hypergraph(n, 1 + gen() % 15, 6, gen);
    const Matrix z = random_matrix(n, 1 + gen() % 5, gen);
    EXPECT_EQ(smoothness_loss(z, h).value, brute_force_smoothness(z, h));
  }
}

TEST(SmoothnessLossTest, DeterministicAcrossCalls) {
  std::mt19937_64 gen(5);
  const Hypergraph h = random_test_hypergraph(12, 10, 6, gen);
  // Integer coordinates create many ties.
  Matrix z(12, 2);
  for (double& v : z.data()) v = static_cast<double>(gen() % 3);
  const auto a = smoothness_loss(z, h);
  const auto b = smoothness_loss(z, h);
  EXPECT_EQ(a.argmax_pairs, b.argmax_pairs);
  EXPECT_TRUE(bitwise_equal(a.gradient, b.gradient));
}

TEST(SmoothnessLossTest, TranslationAndScaleInvariance) {
  std::mt19937_64 gen(6);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + gen() % 10;
    const Hypergraph h = random_test_hypergraph(n, 1 + gen() % 8, 6, gen);
    const Matrix z = random_matrix(n, 3, gen);
    const double base = smoothness_loss(z, h).value;
    Matrix shifted = z;
    Matrix scaled = z;
    const double s = 3.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < 3; ++k) {
        shifted(i, k) += 0.5 * static_cast<double>(k + 1);
        scaled(i, k) *= s;
      }
    }
    const double tol = 1e-12 * std::max(base, 1e-300);
    EXPECT_NEAR(smoothness_loss(shifted, h).value, base, 1e-12 * std::max(base, 1.0));
    EXPECT_NEAR(smoothness_loss(scaled, h).value, s * s * base, s * s * tol + 1e-300);
  }
}

TEST(QuadraticFormOracleTest, CentroidOfPair) {
  const Hypergraph h = build_hypergraph(2, {{0, 1}});
  const Matrix zv = Matrix::from_rows({{0, 0}, {2, 0}});
  EXPECT_DOUBLE_EQ(quadratic_form_oracle(zv, Matrix::from_rows({{1, 0}}), h), 2.0);
}

TEST(QuadraticFormOracleTest, EdgeEmbeddingEqualToMembers) {
  const Hypergraph h = build_hypergraph(3, {{0, 1, 2}});
  const Matrix zv(3, 2, 4.0);
  EXPECT_EQ(quadratic_form_oracle(zv, Matrix(1, 2, 4.0), h), 0.0);
}

TEST(QuadraticFormOracleTest, ShapeMismatchThrows) {
  const Hypergraph h = build_hypergraph(3, {{0, 1, 2}});
  EXPECT_THROW(quadratic_form_oracle(Matrix(2, 2), Matrix(1, 2), h),
               InvalidArgument);
  EXPECT_THROW(quadratic_form_oracle(Matrix(3, 2), Matrix(2, 2), h),
               InvalidArgument);
}

TEST(QuadraticFormOracleTest, MatchesLaplacianForm) {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + gen() % 15;
    const Hypergraph h = random_test_hypergraph(n, 1 + gen() % 10, 6, gen);
    const std::size_t d = 1 + gen() % 4;
    const Matrix zv = random_matrix(n, d, gen);
    const Matrix ze = random_matrix(h.num_edges(), d, gen);
    Matrix stacked(n + h.num_edges(), d);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < d; ++k) stacked(i, k) = zv(i, k);
    }
    for (std::size_t j = 0; j < h.num_edges(); ++j) {
      for (std::size_t k = 0; k < d; ++k) stacked(n + j, k) = ze(j, k);
    }
    const double oracle = quadratic_form_oracle(zv, ze, h);
    const double lap = incidence_laplacian(h).quadratic_form(stacked);
    EXPECT_LE(std::abs(oracle - lap), 1e-9 * std::max(std::abs(oracle), 1e-300));
  }
}

TEST(LowerBoundTest, HalfMaxPairBoundHolds) {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + gen() % 12;
    const Hypergraph h = random_test_hypergraph(n, 1 + gen() % 8, 6, gen);
    const std::size_t d = 1 + gen() % 4;
    const Matrix zv = random_matrix(n, d, gen);
    const Matrix ze = random_matrix(h.num_edges(), d, gen);
    for (std::size_t j = 0; j < h.num_edges(); ++j) {
      const auto edge = h.edge(j);
      double sum = 0.0;
      double max_pair = 0.0;
      for (NodeIndex v : edge) sum += squared_distance(ze.row(j), zv.row(v));
      for (NodeIndex a : edge) {
        for (NodeIndex b : edge) {
          max_pair = std::max(max_pair, squared_distance(zv.row(a), zv.row(b)));
        }
      }
      EXPECT_GE(sum * (1 + 1e-12), 0.5 * max_pair);
    }
    const double m = static_cast<double>(h.num_edges());
    EXPECT_GE(quadratic_form_oracle(zv, ze, h) * (1 + 1e-12),
              0.5 * m * smoothness_loss(zv, h).value);
  }
}

TEST(CrossEntropyTest, UniformPredictionIsLogC) {
  const Matrix logits(3, 4, 0.7);
  const std::vector<int> labels = {0, 3, 2};
  const std::vector<std::size_t> nodes = {0, 1, 2};
  EXPECT_NEAR(cross_entropy(logits, labels, nodes).value, std::log(4.0), 1e-15);
  EXPECT_NEAR(cross_entropy(logits, labels, nodes).value, 1.386294, 1e-6);
}

TEST(CrossEntropyTest, SingleNodeHalfHalf) {
  const std::vector<int> labels = {0};
  const std::vector<std::size_t> nodes = {0};
  const auto r = cross_entropy(Matrix::from_rows({{1.0, 1.0}}), labels, nodes);
  EXPECT_NEAR(r.value, 0.693147, 1e-6);
}

TEST(CrossEntropyTest, ConfidentCorrectTendsToZero) {
  const std::vector<int> labels = {1};
  const std::vector<std::size_t> nodes = {0};
  double previous = 1.0;
  for (double scale : {2.0, 5.0, 10.0, 20.0}) {
    const double v =
        cross_entropy(Matrix::from_rows({{0.0, scale, 0.0}}), labels, nodes).value;
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, previous);
    previous = v;
  }
  EXPECT_LT(previous, 1e-8);
  const double saturated =
      cross_entropy(Matrix::from_rows({{0.0, 800.0, 0.0}}), labels, nodes).value;
  EXPECT_EQ(saturated, 0.0);
}

TEST(CrossEntropyTest, GradientZeroOutsideSelection) {
  std::mt19937_64 gen(9);
  const Matrix logits = random_matrix(5, 3, gen);
  const std::vector<int> labels = {0, 1, 2, 0, -1};
  const std::vector<std::size_t> nodes = {1, 3};
  const auto r = cross_entropy(logits, labels, nodes);
  for (std::size_t v : {0u, 2u, 4u}) {
    for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(r.dlogits(v, k), 0.0);
  }
  const Matrix p = softmax_rows(logits);
  EXPECT_NEAR(r.dlogits(1, 1), (p(1, 1) - 1.0) / 2.0, 1e-15);
  EXPECT_NEAR(r.dlogits(3, 2), p(3, 2) / 2.0, 1e-15);
}

TEST(CrossEntropyTest, Errors) {
  const Matrix logits(2, 2);
  const std::vector<int> labels = {0, -1};
  const std::vector<std::size_t> none;
  const std::vector<std::size_t> unlabeled = {1};
  EXPECT_THROW(cross_entropy(logits, labels, none), InvalidArgument);
  EXPECT_THROW(cross_entropy(logits, labels, unlabeled), InvalidArgument);
}

TEST(OverallLossTest, Combination) {
  const LossBreakdown b = overall_loss(1.0, 2.0, 0.5);
  EXPECT_EQ(b.total, 2.0);
  EXPECT_EQ(b.ce, 1.0);
  EXPECT_EQ(b.smooth, 2.0);
  EXPECT_EQ(b.alpha, 0.5);
}

TEST(OverallLossTest, ZeroAlphaIsCrossEntropyBitwise) {
  std::mt19937_64 gen(10);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int i = 0; i < 100; ++i) {
    const double ce = u(gen);
    const double total = overall_loss(ce, u(gen), 0.0).total;
    EXPECT_EQ(std::memcmp(&total, &ce, sizeof ce), 0);
  }
}

TEST(OverallLossTest, NegativeAlphaThrows) {
  EXPECT_THROW(overall_loss(1.0, 1.0, -0.1), InvalidArgument);
}

TEST(OverallLossTest, GradientIsSumOfParts) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 3 + gen() % 5;
    const std::size_t c = 2 + gen() % 3;
    const Hypergraph h = random_test_hypergraph(n, 1 + gen() % 5, 4, gen);
    Matrix z = random_matrix(n, c, gen);
    std::vector<int> labels(n);
    for (int& l : labels) l = static_cast<int>(gen() % c);
    const std::vector<std::size_t> nodes = {0, 1, 2};
    const double alpha = 0.3;
    auto total = [&] {
      return overall_loss(cross_entropy(z, labels, nodes).value,
                          smoothness_loss(z, h).value, alpha)
          .total;
    };
    const Matrix gce = cross_entropy(z, labels, nodes).dlogits;
    const Matrix gsm = smoothness_loss(z, h).gradient;
    std::vector<double> analytic(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
      analytic[i] = gce.data()[i] + alpha * gsm.data()[i];
    }
    const auto numeric = testing::finite_difference(z.data(), total);
    EXPECT_LT(testing::relative_error(analytic, numeric), 1e-5);
  }
}

}  // namespace
}  // namespace hgmlp
