#include "hgmlp/nn.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "hgmlp/error.h"

namespace hgmlp {
namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InvalidArgument(std::string(op) + ": shape mismatch");
  }
}

struct RowMoments {
  double mean;
  double rstd;
};

// Mean and 1/sqrt(var + eps) of one row. Eight interleaved partial sums so
// the reductions vectorize; the summation order is fixed.
RowMoments row_moments(const double* row, std::size_t b, double eps) {
  const double inv_b = 1.0 / static_cast<double>(b);
  const std::size_t full = b - b % 8;
  double part[8] = {};
  for (std::size_t k = 0; k < full; k += 8) {
    for (std::size_t l = 0; l < 8; ++l) part[l] += row[k + l];
  }
  double sum = ((part[0] + part[1]) + (part[2] + part[3])) +
               ((part[4] + part[5]) + (part[6] + part[7]));
  for (std::size_t k = full; k < b; ++k) sum += row[k];
  const double mean = sum * inv_b;

  double sq[8] = {};
  for (std::size_t k = 0; k < full; k += 8) {
    for (std::size_t l = 0; l < 8; ++l) {
      const double d = row[k + l] - mean;
      sq[l] += d * d;
    }
  }
  double var = ((sq[0] + sq[1]) + (sq[2] + sq[3])) +
               ((sq[4] + sq[5]) + (sq[6] + sq[7]));
  for (std::size_t k = full; k < b; ++k) {
    const double d = row[k] - mean;
    var += d * d;
  }
  var *= inv_b;
  const double rstd = 1.0 / std::sqrt(var + eps);
  // A zero-variance row with eps == 0 normalizes to 0 instead of NaN.
  return {mean, std::isfinite(rstd) ? rstd : 0.0};
}

}  // namespace

std::size_t ModelParams::input_dim() const {
  return layers.empty() ? 0 : layers.front().weight.rows();
}

std::vector<std::size_t> ModelParams::widths() const {
  std::vector<std::size_t> out;
  out.reserve(layers.size());
  for (const auto& l : layers) out.push_back(l.weight.cols());
  return out;
}

void ModelParams::validate() const {
  if (layers.empty()) throw InvalidArgument("model must have at least one layer");
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw InvalidArgument("dropout rate must be in [0, 1)");
  }
  if (!(ln_eps >= 0.0)) throw InvalidArgument("layer-norm eps must be >= 0");
  std::size_t width = layers.front().weight.rows();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    if (layer.weight.rows() != width || layer.weight.cols() == 0) {
      throw InvalidArgument("layer " + std::to_string(l) +
                            ": weight shape does not chain");
    }
    width = layer.weight.cols();
    if (layer.ln_gain.size() != width || layer.ln_bias.size() != width) {
      throw InvalidArgument("layer " + std::to_string(l) +
                            ": layer-norm parameter length mismatch");
    }
  }
  if (head.rows() != width || head.cols() == 0) {
    throw InvalidArgument("head input width does not match last layer");
  }
}

std::vector<std::span<double>> ModelParams::tensors() {
  std::vector<std::span<double>> out;
  for (auto& l : layers) {
    out.emplace_back(l.weight.data());
    out.emplace_back(l.ln_gain);
    out.emplace_back(l.ln_bias);
  }
  out.emplace_back(head.data());
  return out;
}

std::vector<std::span<const double>> ModelParams::tensors() const {
  std::vector<std::span<const double>> out;
  for (const auto& l : layers) {
    out.emplace_back(l.weight.data());
    out.emplace_back(l.ln_gain);
    out.emplace_back(l.ln_bias);
  }
  out.emplace_back(head.data());
  return out;
}

ModelParams init_params(const ModelSpec& spec, Rng& rng) {
  if (spec.hidden.empty()) throw InvalidArgument("need at least one layer");
  if (spec.input_dim == 0 || spec.num_classes == 0) {
    throw InvalidArgument("input_dim and num_classes must be positive");
  }
  auto glorot = [&rng](std::size_t fan_in, std::size_t fan_out) {
    Matrix w(fan_in, fan_out);
    const double bound =
        std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (double& v : w.data()) v = (2.0 * rng.uniform() - 1.0) * bound;
    return w;
  };
  ModelParams p;
  p.dropout = spec.dropout;
  p.ln_eps = spec.ln_eps;
  std::size_t width = spec.input_dim;
  for (std::size_t out : spec.hidden) {
    if (out == 0) throw InvalidArgument("layer width must be positive");
    p.layers.push_back({glorot(width, out), std::vector<double>(out, 1.0),
                        std::vector<double>(out, 0.0)});
    width = out;
  }
  p.head = glorot(width, spec.num_classes);
  p.validate();
  return p;
}

ModelGrads ModelGrads::zeros_like(const ModelParams& params) {
  ModelGrads g;
  for (const auto& l : params.layers) {
    g.layers.push_back({Matrix(l.weight.rows(), l.weight.cols()),
                        std::vector<double>(l.ln_gain.size(), 0.0),
                        std::vector<double>(l.ln_bias.size(), 0.0)});
  }
  g.head = Matrix(params.head.rows(), params.head.cols());
  return g;
}

std::vector<std::span<double>> ModelGrads::tensors() {
  std::vector<std::span<double>> out;
  for (auto& l : layers) {
    out.emplace_back(l.weight.data());
    out.emplace_back(l.ln_gain);
    out.emplace_back(l.ln_bias);
  }
  out.emplace_back(head.data());
  return out;
}

std::vector<std::span<const double>> ModelGrads::tensors() const {
  std::vector<std::span<const double>> out;
  for (const auto& l : layers) {
    out.emplace_back(l.weight.data());
    out.emplace_back(l.ln_gain);
    out.emplace_back(l.ln_bias);
  }
  out.emplace_back(head.data());
  return out;
}

Matrix linear_forward(const Matrix& x, const Matrix& w) { return matmul(x, w); }

LinearGrads linear_backward(const Matrix& x, const Matrix& w,
                            const Matrix& dy) {
  if (dy.rows() != x.rows() || dy.cols() != w.cols() || x.cols() != w.rows()) {
    throw InvalidArgument("linear_backward: shape mismatch");
  }
  return {matmul_a_bt(dy, w), matmul_at_b(x, dy)};
}

Matrix relu_forward(const Matrix& x) {
  Matrix y = x;
  for (double& v : y.data()) v = v > 0.0 ? v : 0.0;
  return y;
}

Matrix relu_backward(const Matrix& pre, const Matrix& dy) {
  require_same_shape(pre, dy, "relu_backward");
  Matrix dx(dy.rows(), dy.cols());
  const auto p = pre.data();
  const auto g = dy.data();
  auto out = dx.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = p[i] > 0.0 ? g[i] : 0.0;
  return dx;
}

LayerNormOutput layernorm_forward(const Matrix& x, std::span<const double> gain,
                                  std::span<const double> bias, double eps) {
  const std::size_t n = x.rows();
  const std::size_t b = x.cols();
  if (b == 0) throw InvalidArgument("layernorm_forward: zero-width input");
  if (gain.size() != b || bias.size() != b) {
    throw InvalidArgument("layernorm_forward: gain/bias length mismatch");
  }
  LayerNormOutput out{Matrix(n, b),
                      {std::vector<double>(n), std::vector<double>(n),
                       Matrix(n, b)}};
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = x.row(i);
    const RowMoments mom = row_moments(row.data(), b, eps);
    out.stats.mean[i] = mom.mean;
    out.stats.rstd[i] = mom.rstd;
    auto xhat = out.stats.normalized.row(i);
    auto y = out.y.row(i);
    for (std::size_t k = 0; k < b; ++k) {
      xhat[k] = (row[k] - mom.mean) * mom.rstd;
      y[k] = gain[k] * xhat[k] + bias[k];
    }
  }
  return out;
}

LayerNormGrads layernorm_backward(const LayerNormStats& stats,
                                  std::span<const double> gain,
                                  const Matrix& dy) {
  const Matrix& xhat = stats.normalized;
  require_same_shape(xhat, dy, "layernorm_backward");
  const std::size_t n = dy.rows();
  const std::size_t b = dy.cols();
  if (gain.size() != b || stats.rstd.size() != n) {
    throw InvalidArgument("layernorm_backward: stats/gain mismatch");
  }
  LayerNormGrads g{Matrix(n, b), std::vector<double>(b, 0.0),
                   std::vector<double>(b, 0.0)};
  const double inv_b = 1.0 / static_cast<double>(b);
  std::vector<double> dxhat(b);
  for (std::size_t i = 0; i < n; ++i) {
    const auto dyr = dy.row(i);
    const auto xr = xhat.row(i);
    double mean_dxhat = 0.0;
    double mean_dxhat_xhat = 0.0;
    for (std::size_t k = 0; k < b; ++k) {
      g.dgain[k] += dyr[k] * xr[k];
      g.dbias[k] += dyr[k];
      dxhat[k] = dyr[k] * gain[k];
      mean_dxhat += dxhat[k];
      mean_dxhat_xhat += dxhat[k] * xr[k];
    }
    mean_dxhat *= inv_b;
    mean_dxhat_xhat *= inv_b;
    auto dx = g.dx.row(i);
    const double rstd = stats.rstd[i];
    for (std::size_t k = 0; k < b; ++k) {
      dx[k] = rstd * (dxhat[k] - mean_dxhat - xr[k] * mean_dxhat_xhat);
    }
  }
  return g;
}

DropoutOutput dropout_forward(const Matrix& x, double rate, Rng& rng,
                              bool training) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw InvalidArgument("dropout rate must be in [0, 1)");
  }
  if (!training || rate == 0.0) {
    return {x, Matrix(x.rows(), x.cols(), 1.0)};
  }
  DropoutOutput out{Matrix(x.rows(), x.cols()), Matrix(x.rows(), x.cols())};
  const double keep_scale = 1.0 / (1.0 - rate);
  const auto src = x.data();
  auto mask = out.mask.data();
  auto y = out.y.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    mask[i] = rng.uniform() < rate ? 0.0 : keep_scale;
    y[i] = src[i] * mask[i];
  }
  return out;
}

Matrix dropout_backward(const Matrix& mask, const Matrix& dy) {
  require_same_shape(mask, dy, "dropout_backward");
  Matrix dx(dy.rows(), dy.cols());
  const auto m = mask.data();
  const auto g = dy.data();
  auto out = dx.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = g[i] * m[i];
  return dx;
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    const auto row = logits.row(i);
    auto dst = out.row(i);
    const double peak = *std::max_element(row.begin(), row.end());
    double total = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) {
      dst[k] = std::exp(row[k] - peak);
      total += dst[k];
    }
    for (double& v : dst) v /= total;
  }
  return out;
}

Matrix head_forward(const Matrix& z, const Matrix& w) {
  if (z.cols() != w.rows()) throw InvalidArgument("head_forward: shape mismatch");
  return softmax_rows(matmul(z, w));
}

namespace {

// One layer in inference mode; shares the op sequence with mlp_forward.
// Fused and in place, with the same arithmetic as relu_forward followed by
// layernorm_forward, so results are bitwise equal.
Matrix infer_layer(const LayerParams& layer, const Matrix& input, double eps) {
  Matrix out = linear_forward(input, layer.weight);
  const std::size_t b = out.cols();
  const double* gain = layer.ln_gain.data();
  const double* bias = layer.ln_bias.data();
  for (std::size_t i = 0; i < out.rows(); ++i) {
    double* row = out.row(i).data();
    for (std::size_t k = 0; k < b; ++k) row[k] = row[k] > 0.0 ? row[k] : 0.0;
    const RowMoments mom = row_moments(row, b, eps);
    for (std::size_t k = 0; k < b; ++k) {
      row[k] = gain[k] * ((row[k] - mom.mean) * mom.rstd) + bias[k];
    }
  }
  return out;
}

void require_input(const ModelParams& params, const Matrix& x) {
  params.validate();
  if (x.cols() != params.input_dim()) {
    throw InvalidArgument("input width " + std::to_string(x.cols()) +
                          " does not match model input " +
                          std::to_string(params.input_dim()));
  }
}

}  // namespace

ForwardResult mlp_forward(const ModelParams& params, const Matrix& x, Rng* rng,
                          bool training) {
  require_input(params, x);
  if (training && params.dropout > 0.0 && rng == nullptr) {
    throw InvalidArgument("mlp_forward: training with dropout needs an rng");
  }
  Rng unused(0);
  ForwardResult result;
  result.cache.layers.reserve(params.depth());
  Matrix current = x;
  for (const auto& layer : params.layers) {
    LayerCache c;
    c.pre = linear_forward(current, layer.weight);
    Matrix act = relu_forward(c.pre);
    LayerNormOutput ln =
        layernorm_forward(act, layer.ln_gain, layer.ln_bias, params.ln_eps);
    DropoutOutput dr = dropout_forward(ln.y, params.dropout,
                                       rng ? *rng : unused, training);
    c.input = std::move(current);
    c.ln = std::move(ln.stats);
    c.mask = std::move(dr.mask);
    current = std::move(dr.y);
    result.cache.layers.push_back(std::move(c));
  }
  result.embeddings = std::move(current);
  return result;
}

Matrix mlp_embed(const ModelParams& params, const Matrix& x) {
  require_input(params, x);
  Matrix current = infer_layer(params.layers.front(), x, params.ln_eps);
  for (std::size_t l = 1; l < params.depth(); ++l) {
    current = infer_layer(params.layers[l], current, params.ln_eps);
  }
  return current;
}

std::vector<Matrix> mlp_layer_outputs(const ModelParams& params,
                                      const Matrix& x) {
  require_input(params, x);
  std::vector<Matrix> outs;
  outs.reserve(params.depth());
  const Matrix* current = &x;
  for (const auto& layer : params.layers) {
    outs.push_back(infer_layer(layer, *current, params.ln_eps));
    current = &outs.back();
  }
  return outs;
}

MlpBackward mlp_backward(const ModelParams& params, const ForwardCache& cache,
                         const Matrix& d_embeddings) {
  if (cache.layers.size() != params.depth()) {
    throw InvalidArgument("mlp_backward: cache does not match model depth");
  }
  MlpBackward out;
  out.layers.resize(params.depth());
  Matrix grad = d_embeddings;
  for (std::size_t l = params.depth(); l-- > 0;) {
    const auto& layer = params.layers[l];
    const auto& c = cache.layers[l];
    if (c.mask.rows() != grad.rows() || c.mask.cols() != grad.cols() ||
        c.input.cols() != layer.weight.rows()) {
      throw InvalidArgument("mlp_backward: stale cache for layer " +
                            std::to_string(l));
    }
    Matrix d_ln = dropout_backward(c.mask, grad);
    LayerNormGrads lg = layernorm_backward(c.ln, layer.ln_gain, d_ln);
    Matrix d_pre = relu_backward(c.pre, lg.dx);
    LinearGrads lin = linear_backward(c.input, layer.weight, d_pre);
    out.layers[l] = {std::move(lin.dw), std::move(lg.dgain),
                     std::move(lg.dbias)};
    grad = std::move(lin.dx);
  }
  out.dx = std::move(grad);
  return out;
}

}  // namespace hgmlp
