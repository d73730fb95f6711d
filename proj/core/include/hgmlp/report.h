#ifndef HGMLP_REPORT_H_
#define HGMLP_REPORT_H_

#include <nlohmann/json.hpp>

#include "hgmlp/robustness.h"
#include "hgmlp/trainer.h"

namespace hgmlp {

// JSON views of configs and results. Timings are left out when
// include_timings is false so deterministic runs produce identical bytes.

nlohmann::json config_to_json(const TrainConfig& config);

// Overlays keys present in `j` onto `config`. Unknown keys throw
// InvalidArgument.
void apply_config_json(const nlohmann::json& j, TrainConfig& config);

nlohmann::json train_report(const TrainResult& result, const TrainConfig& config,
                            bool include_timings);

nlohmann::json grid_report(const GridSearchResult& result,
                           const TrainConfig& config, bool include_timings);

nlohmann::json latency_report_json(const LatencyReport& report);
LatencyReport latency_report_from_json(const nlohmann::json& j);

}  // namespace hgmlp

#endif  // HGMLP_REPORT_H_
