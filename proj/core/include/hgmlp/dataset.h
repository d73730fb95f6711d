#ifndef HGMLP_DATASET_H_
#define HGMLP_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hgmlp/hypergraph.h"
#include "hgmlp/matrix.h"

namespace hgmlp {

// Node features, labels and the hypergraph over the same node set.
// Labels are class indices in [0, num_classes) or -1 for unknown.
struct Dataset {
  std::string name;
  Hypergraph hypergraph;
  Matrix features;  // n x d
  std::vector<int> labels;
  int num_classes = 0;

  std::size_t num_nodes() const { return hypergraph.num_nodes(); }
  std::size_t feature_dim() const { return features.cols(); }

  // Throws InvalidArgument when shapes or labels are inconsistent.
  void validate() const;
};

// HGJSON v1 (single JSON document):
//
//   { "version": "hgjson-1", "name": ..., "n": ..., "m": ..., "d": ...,
//     "c": ..., "hyperedges": [[...], ...], "labels": [...],
//     "features": [[...], ...]   |   "features_file": "relative/path.bin" }
//
// features_file holds n*d little-endian float64 values, row-major, and is
// resolved relative to the JSON file. Unknown fields are rejected.
inline constexpr const char* kHgjsonVersion = "hgjson-1";

Dataset load_dataset(const std::filesystem::path& path);

struct SaveOptions {
  // When set, features go to this file (relative to the JSON document's
  // directory) instead of being inlined.
  std::string features_file;
};

void save_dataset(const Dataset& dataset, const std::filesystem::path& path,
                  const SaveOptions& options = {});

// Parses an HGJSON document already in memory. base_dir resolves
// features_file.
Dataset parse_dataset(const std::string& text,
                      const std::filesystem::path& base_dir);

struct SynthOptions {
  std::size_t n = 1000;
  std::size_t m = 600;
  int num_classes = 4;
  std::size_t feature_dim = 16;
  std::size_t min_cardinality = 3;
  std::size_t max_cardinality = 6;
  double p_homo = 0.9;
  double sigma_f = 2.0;
  std::uint64_t seed = 0;
};

// Planted-class hypergraph: uniform labels, features = class mean (random
// unit vector) + N(0, sigma_f^2) noise, and hyperedges that with
// probability p_homo draw all members from one class, otherwise from all
// nodes. Labels, class means, structure and noise use separate streams, so
// changing sigma_f leaves labels and hyperedges unchanged.
Dataset synth_generate(const SynthOptions& options);

// i.i.d. N(0, sigma^2) entries. Throws InvalidArgument unless sigma > 0.
Matrix gaussian_features(std::size_t n, std::size_t d, double sigma,
                         std::uint64_t seed);

}  // namespace hgmlp

#endif  // HGMLP_DATASET_H_
