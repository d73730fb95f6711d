#include "hgmlp/report.h"

#include <gtest/gtest.h>

#include "hgmlp/error.h"

namespace hgmlp {
namespace {

TEST(ConfigJsonTest, RoundTrip) {
  TrainConfig cfg;
  cfg.hidden = {32, 16, 8};
  cfg.alpha = 0.05;
  cfg.optimizer = OptimizerKind::kSgd;
  cfg.seed = 1234567890123ull;
  cfg.split = {0.6, 0.2, 0.2};
  TrainConfig back;
  apply_config_json(config_to_json(cfg), back);
  EXPECT_EQ(config_to_json(back), config_to_json(cfg));
  EXPECT_EQ(back.hidden, cfg.hidden);
  EXPECT_EQ(back.seed, cfg.seed);
}

TEST(ConfigJsonTest, LayersAndWidth) {
  TrainConfig cfg;
  apply_config_json({{"layers", 4}, {"width", 64}}, cfg);
  EXPECT_EQ(cfg.hidden, (std::vector<std::size_t>{64, 64, 64, 64}));
  apply_config_json({{"layers", 2}}, cfg);
  EXPECT_EQ(cfg.hidden, (std::vector<std::size_t>{64, 64}));
}

TEST(ConfigJsonTest, UnknownKeyRejected) {
  TrainConfig cfg;
  EXPECT_THROW(apply_config_json({{"learning_rate", 0.1}}, cfg), InvalidArgument);
}

TEST(LatencyJsonTest, RoundTrip) {
  LatencyReport r;
  r.environment = "test";
  r.entries.push_back({5000, 100, 2, 100, 400, 100, 1000, 1.5, 2.5, 1.7, 1.2});
  const LatencyReport back = latency_report_from_json(latency_report_json(r));
  ASSERT_EQ(back.entries.size(), 1u);
  EXPECT_EQ(back.entries[0].median_ms, 1.5);
  EXPECT_EQ(back.entries[0].m, 100u);
  EXPECT_EQ(back.environment, "test");
}

}  // namespace
}  // namespace hgmlp
