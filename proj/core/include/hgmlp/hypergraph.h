#ifndef HGMLP_HYPERGRAPH_H_
#define HGMLP_HYPERGRAPH_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hgmlp/matrix.h"

namespace hgmlp {

using NodeIndex = std::uint32_t;

// Nodes 0..n-1 and an ordered list of hyperedges. Each hyperedge is a
// non-empty, strictly increasing list of node indices. Repeated hyperedges
// are allowed. Instances are immutable once built.
class Hypergraph {
 public:
  Hypergraph() = default;

  std::size_t num_nodes() const { return num_nodes_; }
  std::size_t num_edges() const { return edges_.size(); }

  std::span<const NodeIndex> edge(std::size_t j) const { return edges_[j]; }
  const std::vector<std::vector<NodeIndex>>& edges() const { return edges_; }

  // Sum of hyperedge cardinalities (number of nonzeros of H).
  std::size_t incidence_count() const;

  friend bool operator==(const Hypergraph&, const Hypergraph&) = default;

 private:
  friend Hypergraph build_hypergraph(
      std::size_t, std::vector<std::vector<std::int64_t>>);
  friend Hypergraph build_hypergraph_unchecked(
      std::size_t, std::vector<std::vector<NodeIndex>>);

  std::size_t num_nodes_ = 0;
  std::vector<std::vector<NodeIndex>> edges_;
};

// Validates and canonicalizes (sorts, drops repeated members). Throws
// InvalidArgument on n == 0, out-of-range indices, or an empty hyperedge.
Hypergraph build_hypergraph(std::size_t n,
                            std::vector<std::vector<std::int64_t>> edges);

// For callers that already hold canonical edges (sorted, unique, in range,
// non-empty). Checked only in debug builds.
Hypergraph build_hypergraph_unchecked(
    std::size_t n, std::vector<std::vector<NodeIndex>> edges);

struct Degrees {
  std::vector<std::size_t> node_degrees;
  std::vector<std::size_t> edge_cardinalities;
};

Degrees degrees(const Hypergraph& h);

// Dense n x m incidence matrix H. Intended for small instances.
Matrix incidence_matrix(const Hypergraph& h);

// Laplacian of the bipartite node/hyperedge incidence graph, order n + m:
//
//   [ diag(H 1_m)   -H            ]
//   [ -H^T          diag(H^T 1_n) ]
//
// Stored in CSR form; row i < n is node i, row n + j is hyperedge j.
class IncidenceLaplacian {
 public:
  std::size_t order() const { return row_offsets_.size() - 1; }
  std::size_t num_nodes() const { return num_nodes_; }

  double at(std::size_t row, std::size_t col) const;
  std::vector<double> row_sums() const;
  Matrix to_dense() const;

  // sum over columns c of x[:, c]^T L x[:, c]; x has order() rows, i.e. the
  // node embeddings stacked over the hyperedge embeddings.
  double quadratic_form(const Matrix& x) const;

  std::span<const std::size_t> row_offsets() const { return row_offsets_; }
  std::span<const std::size_t> col_indices() const { return col_indices_; }
  std::span<const double> values() const { return values_; }

 private:
  friend IncidenceLaplacian incidence_laplacian(const Hypergraph&);

  std::size_t num_nodes_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<std::size_t> col_indices_;
  std::vector<double> values_;
};

IncidenceLaplacian incidence_laplacian(const Hypergraph& h);

// Mean over hyperedges of the fraction of unordered member pairs that share
// a label. Pairs touching an unlabeled node (label < 0) are not counted;
// hyperedges with no countable pair are skipped. Throws InvalidArgument if
// no hyperedge has a countable pair or labels.size() != n.
double homophily(const Hypergraph& h, std::span<const int> labels);

}  // namespace hgmlp

#endif  // HGMLP_HYPERGRAPH_H_
