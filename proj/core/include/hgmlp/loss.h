#ifndef HGMLP_LOSS_H_
#define HGMLP_LOSS_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "hgmlp/hypergraph.h"
#include "hgmlp/matrix.h"

namespace hgmlp {

struct NodePair {
  NodeIndex first;
  NodeIndex second;
  friend bool operator==(const NodePair&, const NodePair&) = default;
};

struct SmoothnessResult {
  double value = 0.0;
  // Per hyperedge: the most distant member pair, or nullopt for singletons.
  std::vector<std::optional<NodePair>> argmax_pairs;
  Matrix gradient;  // d value / d z, same shape as z
};

// Hypergraph smoothness loss
//
//   (1/m) * sum_e max_{j,k in e} ||z_j - z_k||^2
//
// Pairs are searched exhaustively; ties go to the lexicographically smallest
// (j, k) with j < k, and the whole subgradient goes to that pair. Singleton
// hyperedges contribute 0. With m == 0 the loss and gradient are 0.
SmoothnessResult smoothness_loss(const Matrix& z, const Hypergraph& h);

// sum_e sum_{v in e} ||z_e - z_v||^2, the quadratic form of the incidence
// graph Laplacian evaluated directly from its double sum.
double quadratic_form_oracle(const Matrix& z_nodes, const Matrix& z_edges,
                             const Hypergraph& h);

struct CrossEntropyResult {
  double value = 0.0;
  Matrix dlogits;  // zero outside the selected nodes
};

// Mean negative log-likelihood of the true class over `nodes`, computed
// with a log-softmax on the raw logits. The gradient with respect to the
// logits is (softmax - onehot) / |nodes| on selected rows.
CrossEntropyResult cross_entropy(const Matrix& logits, std::span<const int> labels,
                                 std::span<const std::size_t> nodes);

struct LossBreakdown {
  double ce = 0.0;
  double smooth = 0.0;
  double alpha = 0.0;
  double total = 0.0;
};

LossBreakdown overall_loss(double ce, double smooth, double alpha);

}  // namespace hgmlp

#endif  // HGMLP_LOSS_H_
