#include "hgmlp/loss.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "hgmlp/error.h"

namespace hgmlp {

SmoothnessResult smoothness_loss(const Matrix& z, const Hypergraph& h) {
  if (z.rows() != h.num_nodes()) {
    throw InvalidArgument("smoothness_loss: z has " + std::to_string(z.rows()) +
                          " rows, hypergraph has " +
                          std::to_string(h.num_nodes()) + " nodes");
  }
  const std::size_t m = h.num_edges();
  SmoothnessResult r;
  r.gradient = Matrix(z.rows(), z.cols());
  r.argmax_pairs.assign(m, std::nullopt);
  if (m == 0) return r;

  const double scale = 2.0 / static_cast<double>(m);
  double total = 0.0;
  for (std::size_t e = 0; e < m; ++e) {
    const auto members = h.edge(e);
    if (members.size() < 2) continue;
    double best = -1.0;
    NodePair pair{members[0], members[1]};
    for (std::size_t a = 0; a < members.size(); ++a) {
      const auto za = z.row(members[a]);
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        const double dist = squared_distance(za, z.row(members[b]));
        if (dist > best) {
          best = dist;
          pair = {members[a], members[b]};
        }
      }
    }
    total += best;
    r.argmax_pairs[e] = pair;
    const auto za = z.row(pair.first);
    const auto zb = z.row(pair.second);
    auto ga = r.gradient.row(pair.first);
    auto gb = r.gradient.row(pair.second);
    for (std::size_t k = 0; k < z.cols(); ++k) {
      const double g = scale * (za[k] - zb[k]);
      ga[k] += g;
      gb[k] -= g;
    }
  }
  r.value = total / static_cast<double>(m);
  return r;
}

double quadratic_form_oracle(const Matrix& z_nodes, const Matrix& z_edges,
                             const Hypergraph& h) {
  if (z_nodes.rows() != h.num_nodes() || z_edges.rows() != h.num_edges() ||
      z_nodes.cols() != z_edges.cols()) {
    throw InvalidArgument("quadratic_form_oracle: shape mismatch");
  }
  double total = 0.0;
  for (std::size_t e = 0; e < h.num_edges(); ++e) {
    const auto ze = z_edges.row(e);
    for (NodeIndex v : h.edge(e)) total += squared_distance(ze, z_nodes.row(v));
  }
  return total;
}

CrossEntropyResult cross_entropy(const Matrix& logits,
                                 std::span<const int> labels,
                                 std::span<const std::size_t> nodes) {
  if (nodes.empty()) throw InvalidArgument("cross_entropy: empty node set");
  if (labels.size() != logits.rows()) {
    throw InvalidArgument("cross_entropy: labels/logits row mismatch");
  }
  const double inv_count = 1.0 / static_cast<double>(nodes.size());
  CrossEntropyResult r{0.0, Matrix(logits.rows(), logits.cols())};
  double total = 0.0;
  for (std::size_t v : nodes) {
    if (v >= logits.rows()) throw InvalidArgument("cross_entropy: node out of range");
    const int label = labels[v];
    if (label < 0 || static_cast<std::size_t>(label) >= logits.cols()) {
      throw InvalidArgument("cross_entropy: node " + std::to_string(v) +
                            " has no valid label");
    }
    const auto row = logits.row(v);
    const double peak = *std::max_element(row.begin(), row.end());
    double sum = 0.0;
    for (double x : row) sum += std::exp(x - peak);
    const double log_sum = std::log(sum);
    total -= row[label] - peak - log_sum;
    auto g = r.dlogits.row(v);
    for (std::size_t k = 0; k < row.size(); ++k) {
      const double target = static_cast<int>(k) == label ? 1.0 : 0.0;
      g[k] = (std::exp(row[k] - peak - log_sum) - target) * inv_count;
    }
  }
  r.value = total * inv_count;
  return r;
}

LossBreakdown overall_loss(double ce, double smooth, double alpha) {
  if (!(alpha >= 0.0)) throw InvalidArgument("alpha must be non-negative");
  return {ce, smooth, alpha, ce + alpha * smooth};
}

}  // namespace hgmlp
