#ifndef HGMLP_MODEL_IO_H_
#define HGMLP_MODEL_IO_H_

#include <filesystem>
#include <iosfwd>

#include <nlohmann/json.hpp>

#include "hgmlp/nn.h"

namespace hgmlp {

// Binary container layout (all integers and floats little-endian):
//
//   bytes 0..5   magic "HGMLP1"
//   u32          tensor count T
//   T x (u32 rows, u32 cols)   shape table
//   payloads     row-major float64, tensors in ModelParams::tensors() order
//                (per layer: weight, ln_gain as 1 x w, ln_bias as 1 x w;
//                then head)
//
// A JSON sidecar at "<path>.json" carries the architecture: input_dim,
// widths, layers, classes, dropout, ln_eps, plus free-form "extra" data
// (e.g. the training seed).
inline constexpr char kModelMagic[6] = {'H', 'G', 'M', 'L', 'P', '1'};
inline constexpr const char* kModelSidecarFormat = "hgmlp-model-1";

void write_model_binary(const ModelParams& params, std::ostream& out);
// The architecture fields come from the sidecar; the shapes must agree.
ModelParams read_model_binary(std::istream& in, const nlohmann::json& sidecar);

nlohmann::json model_sidecar(const ModelParams& params,
                             const nlohmann::json& extra = nlohmann::json::object());

void save_model(const ModelParams& params, const std::filesystem::path& path,
                const nlohmann::json& extra = nlohmann::json::object());

struct LoadedModel {
  ModelParams params;
  nlohmann::json sidecar;
};

LoadedModel load_model(const std::filesystem::path& path);

std::filesystem::path sidecar_path(const std::filesystem::path& model_path);

}  // namespace hgmlp

#endif  // HGMLP_MODEL_IO_H_
