#include "hgmlp/optim.h"

#include <cmath>

#include "hgmlp/error.h"

namespace hgmlp {
namespace {

void require_matching(std::span<const std::span<double>> params,
                      std::span<const std::span<const double>> grads) {
  if (params.size() != grads.size()) {
    throw InvalidArgument("optimizer: parameter/gradient count mismatch");
  }
  for (std::size_t t = 0; t < params.size(); ++t) {
    if (params[t].size() != grads[t].size()) {
      throw InvalidArgument("optimizer: tensor size mismatch");
    }
  }
}

}  // namespace

AdamState AdamState::for_tensors(std::span<const std::span<double>> params) {
  AdamState s;
  for (const auto& p : params) {
    s.m.emplace_back(p.size(), 0.0);
    s.v.emplace_back(p.size(), 0.0);
  }
  return s;
}

void adam_step(std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads, AdamState& state,
               const AdamOptions& options) {
  require_matching(params, grads);
  if (state.m.size() != params.size() || state.v.size() != params.size()) {
    throw InvalidArgument("adam_step: state does not match parameters");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(options.beta1, t);
  const double correction2 = 1.0 - std::pow(options.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto p = params[i];
    const auto g = grads[i];
    auto& m = state.m[i];
    auto& v = state.v[i];
    if (m.size() != p.size() || v.size() != p.size()) {
      throw InvalidArgument("adam_step: state tensor size mismatch");
    }
    for (std::size_t k = 0; k < p.size(); ++k) {
      m[k] = options.beta1 * m[k] + (1.0 - options.beta1) * g[k];
      v[k] = options.beta2 * v[k] + (1.0 - options.beta2) * g[k] * g[k];
      const double m_hat = m[k] / correction1;
      const double v_hat = v[k] / correction2;
      p[k] -= options.lr * m_hat / (std::sqrt(v_hat) + options.eps);
    }
  }
}

void sgd_step(std::span<const std::span<double>> params,
              std::span<const std::span<const double>> grads, double lr) {
  require_matching(params, grads);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto p = params[i];
    const auto g = grads[i];
    for (std::size_t k = 0; k < p.size(); ++k) p[k] -= lr * g[k];
  }
}

}  // namespace hgmlp
