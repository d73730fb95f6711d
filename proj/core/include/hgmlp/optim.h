#ifndef HGMLP_OPTIM_H_
#define HGMLP_OPTIM_H_

#include <cstdint>
#include <span>
#include <vector>

namespace hgmlp {

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// First/second moment buffers, one per parameter tensor.
struct AdamState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  std::int64_t step = 0;

  static AdamState for_tensors(std::span<const std::span<double>> params);
};

// Bias-corrected Adam:
//   m <- b1 m + (1 - b1) g,  v <- b2 v + (1 - b2) g^2
//   p <- p - lr * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps)
void adam_step(std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads, AdamState& state,
               const AdamOptions& options);

// p <- p - lr * g
void sgd_step(std::span<const std::span<double>> params,
              std::span<const std::span<const double>> grads, double lr);

}  // namespace hgmlp

#endif  // HGMLP_OPTIM_H_
