#ifndef HGMLP_NN_H_
#define HGMLP_NN_H_

#include <cstddef>
#include <span>
#include <vector>

#include "hgmlp/matrix.h"
#include "hgmlp/rng.h"

namespace hgmlp {

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

struct LayerParams {
  Matrix weight;                // d_in x d_out, no bias term
  std::vector<double> ln_gain;  // d_out
  std::vector<double> ln_bias;  // d_out
};

// A stack of layers Z <- dropout(layernorm(relu(Z * W))) followed by a
// softmax head. Dropout rate and layer-norm epsilon travel with the
// parameters so a loaded model reproduces the training-time forward pass.
struct ModelParams {
  std::vector<LayerParams> layers;
  Matrix head;  // d_out x classes
  double dropout = 0.5;
  double ln_eps = 1e-5;

  std::size_t depth() const { return layers.size(); }
  std::size_t input_dim() const;
  std::size_t embedding_dim() const { return head.rows(); }
  std::size_t num_classes() const { return head.cols(); }
  std::vector<std::size_t> widths() const;

  // Throws InvalidArgument if widths do not chain or depth == 0.
  void validate() const;

  // Every trainable tensor in a fixed order: per layer weight, gain, bias,
  // then the head. Used by the optimizers and the binary container.
  std::vector<std::span<double>> tensors();
  std::vector<std::span<const double>> tensors() const;
};

struct ModelSpec {
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden;  // one entry per layer, size >= 1
  std::size_t num_classes = 0;
  double dropout = 0.5;
  double ln_eps = 1e-5;
};

// Glorot-uniform weights, unit gain, zero bias.
ModelParams init_params(const ModelSpec& spec, Rng& rng);

// Gradient buffers shaped like ModelParams.
struct ModelGrads {
  struct Layer {
    Matrix weight;
    std::vector<double> ln_gain;
    std::vector<double> ln_bias;
  };
  std::vector<Layer> layers;
  Matrix head;

  static ModelGrads zeros_like(const ModelParams& params);
  std::vector<std::span<double>> tensors();
  std::vector<std::span<const double>> tensors() const;
};

// ---------------------------------------------------------------------------
// Single ops and their exact backward passes
// ---------------------------------------------------------------------------

Matrix linear_forward(const Matrix& x, const Matrix& w);

struct LinearGrads {
  Matrix dx;
  Matrix dw;
};
LinearGrads linear_backward(const Matrix& x, const Matrix& w, const Matrix& dy);

Matrix relu_forward(const Matrix& x);
// pre is the ReLU input; the subgradient at 0 is taken as 0.
Matrix relu_backward(const Matrix& pre, const Matrix& dy);

struct LayerNormStats {
  std::vector<double> mean;
  std::vector<double> rstd;  // 1 / sqrt(var + eps)
  Matrix normalized;         // (x - mean) * rstd
};

struct LayerNormOutput {
  Matrix y;
  LayerNormStats stats;
};

// Row-wise normalization with population variance.
LayerNormOutput layernorm_forward(const Matrix& x, std::span<const double> gain,
                                  std::span<const double> bias, double eps);

struct LayerNormGrads {
  Matrix dx;
  std::vector<double> dgain;
  std::vector<double> dbias;
};
LayerNormGrads layernorm_backward(const LayerNormStats& stats,
                                  std::span<const double> gain,
                                  const Matrix& dy);

struct DropoutOutput {
  Matrix y;
  Matrix mask;  // multiplicative factor per entry: 0 or 1 / (1 - rate)
};

// Inverted dropout. With training == false or rate == 0 the output is the
// input, the mask is all ones, and no random numbers are consumed.
DropoutOutput dropout_forward(const Matrix& x, double rate, Rng& rng,
                              bool training);
Matrix dropout_backward(const Matrix& mask, const Matrix& dy);

// Row-wise softmax with max subtraction.
Matrix softmax_rows(const Matrix& logits);

// softmax(z * w)
Matrix head_forward(const Matrix& z, const Matrix& w);

// ---------------------------------------------------------------------------
// Whole network
// ---------------------------------------------------------------------------

struct LayerCache {
  Matrix input;  // Z^(l-1)
  Matrix pre;    // Z^(l-1) * W
  LayerNormStats ln;
  Matrix mask;
};

struct ForwardCache {
  std::vector<LayerCache> layers;
};

struct ForwardResult {
  Matrix embeddings;  // n x d_out
  ForwardCache cache;
};

// Training mode requires rng; inference mode ignores it (may be null).
ForwardResult mlp_forward(const ModelParams& params, const Matrix& x, Rng* rng,
                          bool training);

// Inference-mode forward without a cache. Bitwise equal to
// mlp_forward(params, x, nullptr, false).embeddings.
Matrix mlp_embed(const ModelParams& params, const Matrix& x);

// Outputs of each layer in inference mode, index l holds Z^(l+1).
std::vector<Matrix> mlp_layer_outputs(const ModelParams& params,
                                      const Matrix& x);

struct MlpBackward {
  std::vector<ModelGrads::Layer> layers;
  Matrix dx;
};

// Backpropagates dL/dZ_out through the cached forward pass. Throws
// InvalidArgument when the cache does not match the parameters.
MlpBackward mlp_backward(const ModelParams& params, const ForwardCache& cache,
                         const Matrix& d_embeddings);

}  // namespace hgmlp

#endif  // HGMLP_NN_H_
