#include "hgmlp/optim.h"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

namespace hgmlp {
namespace {

struct Problem {
  std::vector<double> p;
  std::vector<double> g;
  std::vector<std::span<double>> params() { return {std::span<double>(p)}; }
  std::vector<std::span<const double>> grads() const {
    return {std::span<const double>(g)};
  }
};

TEST(AdamTest, FirstStepMovesByLearningRateAgainstSign) {
  for (double scale : {1e-6, 1e-2, 1.0, 1e4}) {
    Problem pr{{0.0, 1.0, -2.0}, {scale, -scale, 3 * scale}};
    auto params = pr.params();
    AdamState state = AdamState::for_tensors(params);
    const AdamOptions opts;
    adam_step(params, pr.grads(), state, opts);
    EXPECT_NEAR(pr.p[0], 0.0 - opts.lr, 1e-2 * opts.lr);
    EXPECT_NEAR(pr.p[1], 1.0 + opts.lr, 1e-2 * opts.lr);
    EXPECT_NEAR(pr.p[2], -2.0 - opts.lr, 1e-2 * opts.lr);
    EXPECT_EQ(state.step, 1);
  }
}

TEST(AdamTest, ZeroGradientLeavesParameters) {
  Problem pr{{0.5, -1.5}, {0.0, 0.0}};
  auto params = pr.params();
  AdamState state = AdamState::for_tensors(params);
  for (int i = 0; i < 3; ++i) adam_step(params, pr.grads(), state, {});
  EXPECT_EQ(pr.p[0], 0.5);
  EXPECT_EQ(pr.p[1], -1.5);
}

TEST(AdamTest, TwoStepScalarTrace) {
  // f(p) = p^2, p0 = 1, lr 0.1.
  const AdamOptions opts{0.1, 0.9, 0.999, 1e-8};
  Problem pr{{1.0}, {0.0}};
  auto params = pr.params();
  AdamState state = AdamState::for_tensors(params);

  double p = 1.0, m = 0.0, v = 0.0;
  for (int t = 1; t <= 2; ++t) {
    const double g = 2.0 * p;
    m = 0.9 * m + 0.1 * g;
    v = 0.999 * v + 0.001 * g * g;
    const double mh = m / (1.0 - std::pow(0.9, t));
    const double vh = v / (1.0 - std::pow(0.999, t));
    p -= 0.1 * mh / (std::sqrt(vh) + 1e-8);

    pr.g[0] = 2.0 * pr.p[0];
    adam_step(params, pr.grads(), state, opts);
    EXPECT_NEAR(pr.p[0], p, 1e-12);
  }
  // Step 1 lands at 0.9; step 2 at about 0.9 - 0.1 * 0.9959.
  EXPECT_NEAR(p, 0.80041, 1e-4);
}

TEST(SgdTest, PlainUpdate) {
  Problem pr{{1.0, 2.0}, {0.5, -4.0}};
  auto params = pr.params();
  sgd_step(params, pr.grads(), 0.25);
  EXPECT_EQ(pr.p[0], 0.875);
  EXPECT_EQ(pr.p[1], 3.0);
}

}  // namespace
}  // namespace hgmlp
