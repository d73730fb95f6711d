#include "hgmlp/dataset.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "hgmlp/error.h"
#include "hgmlp/rng.h"

namespace hgmlp {
namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// 1-based line and column for a byte offset, for parse diagnostics.
std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw IoError("HGJSON field '" + field + "': " + what);
}

const json& require(const json& doc, const char* field) {
  auto it = doc.find(field);
  if (it == doc.end()) field_error(field, "missing");
  return *it;
}

std::uint64_t require_count(const json& doc, const char* field) {
  const json& v = require(doc, field);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    field_error(field, "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::vector<double> read_features_blob(const std::filesystem::path& path,
                                       std::size_t count) {
  const std::string bytes = read_file(path);
  if (bytes.size() != count * sizeof(double)) {
    throw IoError("features_file " + path.string() + ": expected " +
                  std::to_string(count * sizeof(double)) + " bytes, found " +
                  std::to_string(bytes.size()));
  }
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t bits = 0;
    for (int b = 7; b >= 0; --b) {
      bits = (bits << 8) |
             static_cast<unsigned char>(bytes[i * sizeof(double) + b]);
    }
    values[i] = std::bit_cast<double>(bits);
  }
  return values;
}

void write_features_blob(const std::filesystem::path& path, const Matrix& x) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  for (double v : x.data()) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    char bytes[8];
    for (int b = 0; b < 8; ++b) {
      bytes[b] = static_cast<char>(bits & 0xFF);
      bits >>= 8;
    }
    out.write(bytes, 8);
  }
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

void Dataset::validate() const {
  const std::size_t n = hypergraph.num_nodes();
  if (n == 0) throw InvalidArgument("dataset has no nodes");
  if (features.rows() != n) {
    throw InvalidArgument("feature rows " + std::to_string(features.rows()) +
                          " != n " + std::to_string(n));
  }
  if (features.cols() == 0) throw InvalidArgument("feature dimension is 0");
  if (!features.all_finite()) throw InvalidArgument("features contain NaN/Inf");
  if (labels.size() != n) {
    throw InvalidArgument("labels length " + std::to_string(labels.size()) +
                          " != n " + std::to_string(n));
  }
  if (num_classes <= 0) throw InvalidArgument("class count must be positive");
  bool any_labeled = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] < -1 || labels[i] >= num_classes) {
      throw InvalidArgument("label of node " + std::to_string(i) + " (" +
                            std::to_string(labels[i]) + ") outside [-1, " +
                            std::to_string(num_classes) + ")");
    }
    any_labeled = any_labeled || labels[i] >= 0;
  }
  if (!any_labeled) throw InvalidArgument("dataset has no labeled node");
}

Dataset parse_dataset(const std::string& text,
                      const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw IoError("HGJSON parse error at " + line_col(text, e.byte) + ": " +
                  e.what());
  }
  if (!doc.is_object()) throw IoError("HGJSON document must be an object");

  static const std::set<std::string> kAllowed = {
      "version", "name",       "n",        "m",       "d",
      "c",       "hyperedges", "labels",   "features", "features_file"};
  for (const auto& item : doc.items()) {
    if (!kAllowed.contains(item.key())) field_error(item.key(), "unknown field");
  }

  const json& version = require(doc, "version");
  if (!version.is_string() || version.get<std::string>() != kHgjsonVersion) {
    field_error("version", std::string("expected \"") + kHgjsonVersion + "\"");
  }
  const json& name = require(doc, "name");
  if (!name.is_string()) field_error("name", "expected a string");

  const std::uint64_t n = require_count(doc, "n");
  const std::uint64_t m = require_count(doc, "m");
  const std::uint64_t d = require_count(doc, "d");
  const std::uint64_t c = require_count(doc, "c");

  const json& edges_json = require(doc, "hyperedges");
  if (!edges_json.is_array()) field_error("hyperedges", "expected an array");
  if (edges_json.size() != m) {
    field_error("hyperedges", "has " + std::to_string(edges_json.size()) +
                                  " entries but m = " + std::to_string(m));
  }
  std::vector<std::vector<std::int64_t>> edges;
  edges.reserve(m);
  for (std::size_t j = 0; j < edges_json.size(); ++j) {
    const json& e = edges_json[j];
    const std::string where = "hyperedges[" + std::to_string(j) + "]";
    if (!e.is_array()) field_error(where, "expected an array of node indices");
    std::vector<std::int64_t> members;
    members.reserve(e.size());
    for (const json& v : e) {
      if (!v.is_number_integer()) field_error(where, "non-integer node index");
      const std::int64_t idx = v.get<std::int64_t>();
      if (idx < 0 || static_cast<std::uint64_t>(idx) >= n) {
        field_error(where, "node index " + std::to_string(idx) +
                               " out of range [0, " + std::to_string(n) + ")");
      }
      members.push_back(idx);
    }
    edges.push_back(std::move(members));
  }

  const json& labels_json = require(doc, "labels");
  if (!labels_json.is_array() || labels_json.size() != n) {
    field_error("labels", "expected an array of length n = " + std::to_string(n));
  }
  std::vector<int> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < labels_json.size(); ++i) {
    const json& v = labels_json[i];
    if (!v.is_number_integer()) {
      field_error("labels[" + std::to_string(i) + "]", "expected an integer");
    }
    labels.push_back(v.get<int>());
  }

  const bool inline_features = doc.contains("features");
  const bool file_features = doc.contains("features_file");
  if (inline_features == file_features) {
    field_error("features", "exactly one of 'features' or 'features_file' is required");
  }
  Matrix features(n, d);
  if (inline_features) {
    const json& rows = doc["features"];
    if (!rows.is_array() || rows.size() != n) {
      field_error("features", "expected n = " + std::to_string(n) + " rows");
    }
    for (std::size_t i = 0; i < n; ++i) {
      const json& row = rows[i];
      if (!row.is_array() || row.size() != d) {
        field_error("features[" + std::to_string(i) + "]",
                    "expected " + std::to_string(d) + " numbers");
      }
      for (std::size_t k = 0; k < d; ++k) {
        if (!row[k].is_number()) {
          field_error("features[" + std::to_string(i) + "]", "non-numeric entry");
        }
        features(i, k) = row[k].get<double>();
      }
    }
  } else {
    const json& rel = doc["features_file"];
    if (!rel.is_string()) field_error("features_file", "expected a path string");
    const auto values =
        read_features_blob(base_dir / rel.get<std::string>(), n * d);
    std::copy(values.begin(), values.end(), features.data().begin());
  }

  Dataset ds;
  ds.name = name.get<std::string>();
  try {
    ds.hypergraph = build_hypergraph(n, std::move(edges));
  } catch (const InvalidArgument& e) {
    throw IoError(std::string("HGJSON: ") + e.what());
  }
  ds.features = std::move(features);
  ds.labels = std::move(labels);
  ds.num_classes = static_cast<int>(c);
  try {
    ds.validate();
  } catch (const InvalidArgument& e) {
    throw IoError(std::string("HGJSON: ") + e.what());
  }
  return ds;
}

Dataset load_dataset(const std::filesystem::path& path) {
  return parse_dataset(read_file(path), path.parent_path());
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path,
                  const SaveOptions& options) {
  dataset.validate();
  const Hypergraph& h = dataset.hypergraph;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());

  // One hyperedge / feature row per line keeps large files diffable.
  out << "{\n";
  out << "  \"version\": " << json(kHgjsonVersion).dump() << ",\n";
  out << "  \"name\": " << json(dataset.name).dump() << ",\n";
  out << "  \"n\": " << h.num_nodes() << ",\n";
  out << "  \"m\": " << h.num_edges() << ",\n";
  out << "  \"d\": " << dataset.feature_dim() << ",\n";
  out << "  \"c\": " << dataset.num_classes << ",\n";
  out << "  \"hyperedges\": [";
  for (std::size_t j = 0; j < h.num_edges(); ++j) {
    out << (j ? ",\n    " : "\n    ") << json(h.edges()[j]).dump();
  }
  out << (h.num_edges() ? "\n  ],\n" : "],\n");
  out << "  \"labels\": " << json(dataset.labels).dump() << ",\n";
  if (options.features_file.empty()) {
    out << "  \"features\": [";
    for (std::size_t i = 0; i < dataset.num_nodes(); ++i) {
      const auto row = dataset.features.row(i);
      out << (i ? ",\n    " : "\n    ")
          << json(std::vector<double>(row.begin(), row.end())).dump();
    }
    out << "\n  ]\n";
  } else {
    write_features_blob(path.parent_path() / options.features_file,
                        dataset.features);
    out << "  \"features_file\": " << json(options.features_file).dump() << "\n";
  }
  out << "}\n";
  if (!out) throw IoError("failed writing " + path.string());
}

Dataset synth_generate(const SynthOptions& o) {
  if (o.num_classes <= 0) throw InvalidArgument("class count must be positive");
  const auto c = static_cast<std::size_t>(o.num_classes);
  if (o.n < c) throw InvalidArgument("synth_generate: need n >= c");
  if (o.feature_dim == 0) throw InvalidArgument("synth_generate: d must be positive");
  if (o.min_cardinality < 2 || o.min_cardinality > o.max_cardinality ||
      o.max_cardinality > o.n) {
    throw InvalidArgument("synth_generate: infeasible cardinality range [" +
                          std::to_string(o.min_cardinality) + ", " +
                          std::to_string(o.max_cardinality) + "] for n = " +
                          std::to_string(o.n));
  }
  if (!(o.p_homo >= 0.0 && o.p_homo <= 1.0)) {
    throw InvalidArgument("synth_generate: p_homo must be in [0, 1]");
  }
  if (!(o.sigma_f >= 0.0)) throw InvalidArgument("synth_generate: sigma_f < 0");

  Rng label_rng = make_stream(o.seed, Stream::kLabels);
  std::vector<int> labels(o.n);
  std::vector<std::vector<std::size_t>> by_class(c);
  for (std::size_t i = 0; i < o.n; ++i) {
    labels[i] = static_cast<int>(label_rng.below(c));
    by_class[labels[i]].push_back(i);
  }

  Rng mean_rng = make_stream(o.seed, Stream::kClassMeans);
  Matrix means(c, o.feature_dim);
  for (std::size_t k = 0; k < c; ++k) {
    auto row = means.row(k);
    double norm = 0.0;
    while (norm == 0.0) {
      for (double& v : row) v = mean_rng.normal();
      norm = std::sqrt(squared_distance(row, std::vector<double>(row.size())));
    }
    for (double& v : row) v /= norm;
  }

  Rng noise_rng = make_stream(o.seed, Stream::kFeatureNoise);
  Matrix features(o.n, o.feature_dim);
  for (std::size_t i = 0; i < o.n; ++i) {
    const auto mean = means.row(labels[i]);
    auto row = features.row(i);
    for (std::size_t k = 0; k < o.feature_dim; ++k) {
      row[k] = mean[k] + o.sigma_f * noise_rng.normal();
    }
  }

  Rng edge_rng = make_stream(o.seed, Stream::kStructure);
  std::vector<std::vector<NodeIndex>> edges;
  edges.reserve(o.m);
  const std::size_t span = o.max_cardinality - o.min_cardinality + 1;
  std::vector<std::size_t> eligible;
  for (std::size_t j = 0; j < o.m; ++j) {
    const std::size_t card =
        o.min_cardinality + static_cast<std::size_t>(edge_rng.below(span));
    const bool homophilic = edge_rng.uniform() < o.p_homo;
    eligible.clear();
    if (homophilic) {
      for (std::size_t k = 0; k < c; ++k) {
        if (by_class[k].size() >= card) eligible.push_back(k);
      }
    }
    std::vector<NodeIndex> members;
    members.reserve(card);
    if (!eligible.empty()) {
      const auto& pool = by_class[eligible[edge_rng.below(eligible.size())]];
      for (std::size_t idx : sample_without_replacement(pool.size(), card, edge_rng)) {
        members.push_back(static_cast<NodeIndex>(pool[idx]));
      }
      std::sort(members.begin(), members.end());
    } else {
      for (std::size_t v : sample_without_replacement(o.n, card, edge_rng)) {
        members.push_back(static_cast<NodeIndex>(v));
      }
    }
    edges.push_back(std::move(members));
  }

  Dataset ds;
  ds.name = "synth-n" + std::to_string(o.n) + "-m" + std::to_string(o.m) +
            "-c" + std::to_string(c) + "-seed" + std::to_string(o.seed);
  ds.hypergraph = build_hypergraph_unchecked(o.n, std::move(edges));
  ds.features = std::move(features);
  ds.labels = std::move(labels);
  ds.num_classes = o.num_classes;
  return ds;
}

Matrix gaussian_features(std::size_t n, std::size_t d, double sigma,
                         std::uint64_t seed) {
  if (!(sigma > 0.0)) throw InvalidArgument("gaussian_features: sigma must be > 0");
  Rng rng = make_stream(seed, Stream::kGaussianFeatures);
  Matrix x(n, d);
  for (double& v : x.data()) v = sigma * rng.normal();
  return x;
}

}  // namespace hgmlp
