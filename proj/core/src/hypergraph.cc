#include "hgmlp/hypergraph.h"

#include <algorithm>
#include <cassert>
#include <string>

#include "hgmlp/error.h"

namespace hgmlp {

std::size_t Hypergraph::incidence_count() const {
  std::size_t total = 0;
  for (const auto& e : edges_) total += e.size();
  return total;
}

Hypergraph build_hypergraph(std::size_t n,
                            std::vector<std::vector<std::int64_t>> edges) {
  if (n == 0) throw InvalidArgument("hypergraph must have at least one node");
  if (n > UINT32_MAX) throw InvalidArgument("too many nodes for 32-bit index");
  std::vector<std::vector<NodeIndex>> canonical;
  canonical.reserve(edges.size());
  for (std::size_t j = 0; j < edges.size(); ++j) {
    auto& e = edges[j];
    for (std::int64_t v : e) {
      if (v < 0 || static_cast<std::uint64_t>(v) >= n) {
        throw InvalidArgument("hyperedge " + std::to_string(j) + ": index " +
                              std::to_string(v) + " out of range [0, " +
                              std::to_string(n) + ")");
      }
    }
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
    if (e.empty()) {
      throw InvalidArgument("hyperedge " + std::to_string(j) + " is empty");
    }
    canonical.emplace_back(e.begin(), e.end());
  }
  Hypergraph h;
  h.num_nodes_ = n;
  h.edges_ = std::move(canonical);
  return h;
}

Hypergraph build_hypergraph_unchecked(
    std::size_t n, std::vector<std::vector<NodeIndex>> edges) {
#ifndef NDEBUG
  for (const auto& e : edges) {
    assert(!e.empty());
    assert(std::adjacent_find(e.begin(), e.end(), std::greater_equal<>()) ==
           e.end());
    assert(e.back() < n);
  }
#endif
  Hypergraph h;
  h.num_nodes_ = n;
  h.edges_ = std::move(edges);
  return h;
}

Degrees degrees(const Hypergraph& h) {
  Degrees d;
  d.node_degrees.assign(h.num_nodes(), 0);
  d.edge_cardinalities.reserve(h.num_edges());
  for (const auto& e : h.edges()) {
    d.edge_cardinalities.push_back(e.size());
    for (NodeIndex v : e) ++d.node_degrees[v];
  }
  return d;
}

Matrix incidence_matrix(const Hypergraph& h) {
  Matrix out(h.num_nodes(), h.num_edges());
  for (std::size_t j = 0; j < h.num_edges(); ++j) {
    for (NodeIndex v : h.edge(j)) out(v, j) = 1.0;
  }
  return out;
}

IncidenceLaplacian incidence_laplacian(const Hypergraph& h) {
  const std::size_t n = h.num_nodes();
  const std::size_t m = h.num_edges();

  // Node rows need their incident hyperedges in increasing order.
  std::vector<std::vector<std::size_t>> incident(n);
  for (std::size_t j = 0; j < m; ++j) {
    for (NodeIndex v : h.edge(j)) incident[v].push_back(j);
  }

  IncidenceLaplacian lap;
  lap.num_nodes_ = n;
  lap.row_offsets_.reserve(n + m + 1);
  const std::size_t nnz = n + m + 2 * h.incidence_count();
  lap.col_indices_.reserve(nnz);
  lap.values_.reserve(nnz);

  for (std::size_t i = 0; i < n; ++i) {
    lap.col_indices_.push_back(i);
    lap.values_.push_back(static_cast<double>(incident[i].size()));
    for (std::size_t j : incident[i]) {
      lap.col_indices_.push_back(n + j);
      lap.values_.push_back(-1.0);
    }
    lap.row_offsets_.push_back(lap.col_indices_.size());
  }
  for (std::size_t j = 0; j < m; ++j) {
    for (NodeIndex v : h.edge(j)) {
      lap.col_indices_.push_back(v);
      lap.values_.push_back(-1.0);
    }
    lap.col_indices_.push_back(n + j);
    lap.values_.push_back(static_cast<double>(h.edge(j).size()));
    lap.row_offsets_.push_back(lap.col_indices_.size());
  }
  return lap;
}

double IncidenceLaplacian::at(std::size_t row, std::size_t col) const {
  if (row >= order() || col >= order()) {
    throw InvalidArgument("IncidenceLaplacian::at: index out of range");
  }
  for (std::size_t k = row_offsets_[row]; k < row_offsets_[row + 1]; ++k) {
    if (col_indices_[k] == col) return values_[k];
  }
  return 0.0;
}

std::vector<double> IncidenceLaplacian::row_sums() const {
  std::vector<double> sums(order(), 0.0);
  for (std::size_t r = 0; r < order(); ++r) {
    for (std::size_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      sums[r] += values_[k];
    }
  }
  return sums;
}

Matrix IncidenceLaplacian::to_dense() const {
  Matrix out(order(), order());
  for (std::size_t r = 0; r < order(); ++r) {
    for (std::size_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      out(r, col_indices_[k]) += values_[k];
    }
  }
  return out;
}

double IncidenceLaplacian::quadratic_form(const Matrix& x) const {
  if (x.rows() != order()) {
    throw InvalidArgument("quadratic_form: expected " +
                          std::to_string(order()) + " rows, got " +
                          std::to_string(x.rows()));
  }
  double total = 0.0;
  for (std::size_t r = 0; r < order(); ++r) {
    const auto xr = x.row(r);
    for (std::size_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      const auto xc = x.row(col_indices_[k]);
      double dot = 0.0;
      for (std::size_t c = 0; c < x.cols(); ++c) dot += xr[c] * xc[c];
      total += values_[k] * dot;
    }
  }
  return total;
}

double homophily(const Hypergraph& h, std::span<const int> labels) {
  if (labels.size() != h.num_nodes()) {
    throw InvalidArgument("homophily: labels length " +
                          std::to_string(labels.size()) + " != n " +
                          std::to_string(h.num_nodes()));
  }
  double sum = 0.0;
  std::size_t counted_edges = 0;
  for (const auto& e : h.edges()) {
    std::size_t pairs = 0;
    std::size_t agree = 0;
    for (std::size_t a = 0; a < e.size(); ++a) {
      const int la = labels[e[a]];
      if (la < 0) continue;
      for (std::size_t b = a + 1; b < e.size(); ++b) {
        const int lb = labels[e[b]];
        if (lb < 0) continue;
        ++pairs;
        if (la == lb) ++agree;
      }
    }
    if (pairs == 0) continue;
    sum += static_cast<double>(agree) / static_cast<double>(pairs);
    ++counted_edges;
  }
  if (counted_edges == 0) {
    throw InvalidArgument("homophily undefined: no hyperedge has a labeled pair");
  }
  return sum / static_cast<double>(counted_edges);
}

}  // namespace hgmlp
