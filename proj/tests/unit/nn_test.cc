#include "hgmlp/nn.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hgmlp/error.h"
#include "oracles.h"

namespace hgmlp {
namespace {

using testing::max_abs_diff;
using testing::naive_matmul;
using testing::random_matrix;

TEST(LinearForwardTest, IdentityWeight) {
  std::mt19937_64 gen(1);
  const Matrix x = random_matrix(5, 4, gen);
  EXPECT_TRUE(bitwise_equal(linear_forward(x, Matrix::identity(4)), x));
}

TEST(LinearForwardTest, SmallProduct) {
  const Matrix y = linear_forward(Matrix::from_rows({{1, 2}}),
                                  Matrix::from_rows({{1}, {1}}));
  EXPECT_TRUE(bitwise_equal(y, Matrix::from_rows({{3}})));
}

TEST(LinearForwardTest, MatchesNaiveTripleLoop) {
  std::mt19937_64 gen(2);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + gen() % 12;
    const std::size_t a = 1 + gen() % 12;
    const std::size_t b = 1 + gen() % 12;
    const Matrix x = random_matrix(n, a, gen);
    const Matrix w = random_matrix(a, b, gen);
    EXPECT_LT(max_abs_diff(linear_forward(x, w), naive_matmul(x, w)), 1e-12);
  }
}

TEST(LinearForwardTest, DimensionMismatch) {
  EXPECT_THROW(linear_forward(Matrix(2, 3), Matrix(2, 3)), InvalidArgument);
}

TEST(MatmulVariantsTest, TransposedProductsMatchNaive) {
  std::mt19937_64 gen(3);
  const Matrix a = random_matrix(6, 4, gen);
  const Matrix b = random_matrix(6, 5, gen);
  const Matrix c = random_matrix(3, 4, gen);
  EXPECT_LT(max_abs_diff(matmul_at_b(a, b), naive_matmul(transpose(a), b)), 1e-12);
  EXPECT_LT(max_abs_diff(matmul_a_bt(a, c), naive_matmul(a, transpose(c))), 1e-12);
}

TEST(ReluTest, ClampsNegatives) {
  EXPECT_TRUE(bitwise_equal(relu_forward(Matrix::from_rows({{-1, 2}})),
                            Matrix::from_rows({{0, 2}})));
  EXPECT_TRUE(bitwise_equal(relu_forward(Matrix(3, 3, -2.0)), Matrix(3, 3)));
}

TEST(ReluTest, Idempotent) {
  std::mt19937_64 gen(4);
  const Matrix x = random_matrix(7, 5, gen);
  EXPECT_TRUE(bitwise_equal(relu_forward(relu_forward(x)), relu_forward(x)));
}

TEST(LayerNormTest, KnownRow) {
  const std::vector<double> gain = {1, 1, 1};
  const std::vector<double> bias = {0, 0, 0};
  const auto out =
      layernorm_forward(Matrix::from_rows({{1, 2, 3}}), gain, bias, 0.0);
  const double expected = 1.0 / std::sqrt(2.0 / 3.0);
  EXPECT_NEAR(out.y(0, 0), -expected, 1e-12);
  EXPECT_NEAR(out.y(0, 1), 0.0, 1e-12);
  EXPECT_NEAR(out.y(0, 2), expected, 1e-12);
  EXPECT_NEAR(expected, 1.22474, 1e-5);
}

TEST(LayerNormTest, ConstantRowGivesBias) {
  const std::vector<double> gain = {2, 3, 4};
  const std::vector<double> bias = {0.5, -1, 7};
  for (double eps : {0.0, 1e-5}) {
    const auto out = layernorm_forward(Matrix(2, 3, 4.2), gain, bias, eps);
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(out.y(i, k), bias[k]);
    }
  }
}

TEST(LayerNormTest, OutputStatistics) {
  std::mt19937_64 gen(5);
  const std::size_t b = 64;
  const auto gain = testing::random_vector(b, gen, 1.0, 0.5);
  const auto bias = testing::random_vector(b, gen);
  const Matrix x = random_matrix(20, b, gen, 3.0);
  const auto out = layernorm_forward(x, gain, bias, 1e-12);
  // With unit gain and zero bias the rows are exactly standardized.
  const auto plain = layernorm_forward(x, std::vector<double>(b, 1.0),
                                       std::vector<double>(b, 0.0), 1e-12);
  double bias_mean = 0.0;
  for (double v : bias) bias_mean += v;
  bias_mean /= b;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double mean = 0.0;
    double var = 0.0;
    for (double v : plain.y.row(i)) mean += v;
    mean /= b;
    for (double v : plain.y.row(i)) var += (v - mean) * (v - mean);
    var /= b;
    EXPECT_NEAR(mean, 0.0, 1e-12);
    EXPECT_NEAR(var, 1.0, 1e-9);
    // y = gain * xhat + bias: mean(y) = bias mean + <gain, xhat>/b.
    double out_mean = 0.0;
    double cross = 0.0;
    for (std::size_t k = 0; k < b; ++k) {
      out_mean += out.y(i, k);
      cross += gain[k] * plain.y(i, k);
    }
    EXPECT_NEAR(out_mean / b, bias_mean + cross / b, 1e-12);
  }
}

TEST(DropoutTest, ZeroRateIsIdentity) {
  std::mt19937_64 gen(6);
  const Matrix x = random_matrix(4, 4, gen);
  Rng rng(1);
  for (bool training : {true, false}) {
    const auto out = dropout_forward(x, 0.0, rng, training);
    EXPECT_TRUE(bitwise_equal(out.y, x));
    EXPECT_TRUE(bitwise_equal(out.mask, Matrix(4, 4, 1.0)));
  }
}

TEST(DropoutTest, InferenceIsIdentity) {
  std::mt19937_64 gen(7);
  const Matrix x = random_matrix(4, 4, gen);
  Rng rng(1);
  const auto out = dropout_forward(x, 0.7, rng, false);
  EXPECT_TRUE(bitwise_equal(out.y, x));
}

TEST(DropoutTest, PreservesMeanInExpectation) {
  const Matrix x(400, 250, 1.5);
  Rng rng(42);
  const double rate = 0.5;
  const auto out = dropout_forward(x, rate, rng, true);
  double mean = 0.0;
  for (double v : out.y.data()) mean += v;
  mean /= static_cast<double>(out.y.size());
  // Each entry is 0 or 3 with equal probability: sd 1.5.
  const double std_error = 1.5 / std::sqrt(static_cast<double>(out.y.size()));
  EXPECT_NEAR(mean, 1.5, 3.0 * std_error);
  for (double m : out.mask.data()) EXPECT_TRUE(m == 0.0 || m == 2.0);
}

TEST(DropoutTest, RejectsRateOne) {
  Rng rng(1);
  EXPECT_THROW(dropout_forward(Matrix(1, 1), 1.0, rng, true), InvalidArgument);
}

TEST(HeadTest, ZeroLogitsAreUniform) {
  const Matrix p = head_forward(Matrix(1, 3), Matrix(3, 4));
  for (double v : p.data()) EXPECT_EQ(v, 0.25);
}

TEST(HeadTest, LargeLogitsDoNotOverflow) {
  const Matrix p = softmax_rows(Matrix::from_rows({{1000, 0}}));
  EXPECT_NEAR(p(0, 0), 1.0, 1e-12);
  EXPECT_GE(p(0, 1), 0.0);
  EXPECT_LT(p(0, 1), 1e-300);
  EXPECT_TRUE(p.all_finite());
}

TEST(HeadTest, ShiftInvariantBitwise) {
  const Matrix a = softmax_rows(Matrix::from_rows({{0.5, -1.25, 2.0}}));
  const Matrix b = softmax_rows(Matrix::from_rows({{4.5, 2.75, 6.0}}));
  EXPECT_TRUE(bitwise_equal(a, b));
}

TEST(HeadTest, RowsSumToOne) {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 100; ++trial) {
    const double scale = std::pow(10.0, -6.0 + 12.0 * (gen() % 1000) / 1000.0);
    const Matrix p = softmax_rows(random_matrix(5, 1 + gen() % 9, gen, scale));
    for (std::size_t i = 0; i < p.rows(); ++i) {
      double s = 0.0;
      for (double v : p.row(i)) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
        s += v;
      }
      EXPECT_NEAR(s, 1.0, 1e-12);
    }
  }
}

TEST(HeadTest, ShapeMismatch) {
  EXPECT_THROW(head_forward(Matrix(2, 3), Matrix(4, 2)), InvalidArgument);
}

ModelParams small_model(std::size_t d, std::vector<std::size_t> hidden,
                        std::size_t c, double dropout, std::uint64_t seed) {
  Rng rng(seed);
  return init_params({d, std::move(hidden), c, dropout, 1e-5}, rng);
}

TEST(InitTest, GlorotBoundsAndLayerNormDefaults) {
  const ModelParams p = small_model(10, {6, 4}, 3, 0.5, 9);
  EXPECT_EQ(p.depth(), 2u);
  EXPECT_EQ(p.widths(), (std::vector<std::size_t>{6, 4}));
  const double bound = std::sqrt(6.0 / 16.0);
  for (double v : p.layers[0].weight.data()) EXPECT_LE(std::abs(v), bound);
  for (double g : p.layers[1].ln_gain) EXPECT_EQ(g, 1.0);
  for (double b : p.layers[1].ln_bias) EXPECT_EQ(b, 0.0);
  EXPECT_EQ(p.head.rows(), 4u);
  EXPECT_EQ(p.head.cols(), 3u);
}

TEST(InitTest, RejectsZeroDepth) {
  Rng rng(1);
  EXPECT_THROW(init_params({4, {}, 2, 0.0, 1e-5}, rng), InvalidArgument);
}

TEST(MlpForwardTest, SingleLayerComposesOps) {
  // Identity weight, unit gain, zero bias, no dropout: LN(relu(x)).
  ModelParams p;
  p.dropout = 0.0;
  p.ln_eps = 1e-5;
  p.layers.push_back({Matrix::identity(4), std::vector<double>(4, 1.0),
                      std::vector<double>(4, 0.0)});
  p.head = Matrix(4, 2);
  const Matrix x = Matrix::from_rows({{1.2, -0.4, 0.6, -1.4}});
  const auto out = mlp_forward(p, x, nullptr, false);
  const auto ln = layernorm_forward(relu_forward(x), p.layers[0].ln_gain,
                                    p.layers[0].ln_bias, 1e-5);
  EXPECT_TRUE(bitwise_equal(out.embeddings, ln.y));
}

TEST(MlpForwardTest, ZeroDropoutModesAgreeBitwise) {
  const ModelParams p = small_model(5, {7, 7}, 3, 0.0, 3);
  std::mt19937_64 gen(10);
  const Matrix x = random_matrix(9, 5, gen);
  Rng rng(77);
  const auto train_out = mlp_forward(p, x, &rng, true);
  const auto infer_out = mlp_forward(p, x, nullptr, false);
  EXPECT_TRUE(bitwise_equal(train_out.embeddings, infer_out.embeddings));
  EXPECT_TRUE(bitwise_equal(mlp_embed(p, x), infer_out.embeddings));
}

TEST(MlpForwardTest, TrainingModeDeterministicPerSeed) {
  const ModelParams p = small_model(5, {8, 8}, 3, 0.5, 3);
  std::mt19937_64 gen(11);
  const Matrix x = random_matrix(9, 5, gen);
  Rng a(5);
  Rng b(5);
  EXPECT_TRUE(bitwise_equal(mlp_forward(p, x, &a, true).embeddings,
                            mlp_forward(p, x, &b, true).embeddings));
}

TEST(MlpForwardTest, WidthMismatchAndMissingRng) {
  const ModelParams p = small_model(5, {4}, 2, 0.5, 3);
  EXPECT_THROW(mlp_forward(p, Matrix(3, 4), nullptr, false), InvalidArgument);
  EXPECT_THROW(mlp_forward(p, Matrix(3, 5), nullptr, true), InvalidArgument);
}

TEST(MlpForwardTest, FiniteAcrossMagnitudes) {
  const ModelParams p = small_model(6, {5, 5}, 3, 0.3, 4);
  std::mt19937_64 gen(12);
  for (double scale : {1e-6, 1e-3, 1.0, 1e3, 1e6}) {
    const Matrix x = random_matrix(8, 6, gen, scale);
    Rng rng(1);
    const auto out = mlp_forward(p, x, &rng, true);
    EXPECT_TRUE(out.embeddings.all_finite());
    EXPECT_TRUE(head_forward(out.embeddings, p.head).all_finite());
  }
}

TEST(MlpBackwardTest, RejectsStaleCache) {
  const ModelParams p = small_model(5, {4, 4}, 2, 0.0, 3);
  const ModelParams shallow = small_model(5, {4}, 2, 0.0, 3);
  const auto fwd = mlp_forward(shallow, Matrix(3, 5), nullptr, false);
  EXPECT_THROW(mlp_backward(p, fwd.cache, Matrix(3, 4)), InvalidArgument);
  EXPECT_THROW(mlp_backward(shallow, fwd.cache, Matrix(2, 4)), InvalidArgument);
}

}  // namespace
}  // namespace hgmlp
