#ifndef HGMLP_RNG_H_
#define HGMLP_RNG_H_

#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace hgmlp {

// Purpose tags for the independent random streams derived from one master
// seed. Values are part of the reproducibility contract; never renumber.
enum class Stream : std::uint64_t {
  kInit = 1,
  kDropout = 2,
  kSplit = 3,
  kPerturb = 4,
  kLabels = 5,
  kStructure = 6,
  kClassMeans = 7,
  kFeatureNoise = 8,
  kGaussianFeatures = 9,
  kBenchmark = 10,
};

// Seeded pseudo-random source with portable output.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard. The distributions are implemented here rather than taken from
// <random>, because the standard distributions are implementation-defined
// and would break byte-identical artifacts across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform();

  // Standard normal via Box-Muller; spare value is cached.
  double normal();

  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Mixes the master seed with a purpose tag (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t master, Stream purpose);

// k distinct values from [0, pool), sorted ascending (Floyd's algorithm).
// Throws InvalidArgument if k > pool.
std::vector<std::size_t> sample_without_replacement(std::size_t pool,
                                                    std::size_t k, Rng& rng);

inline Rng make_stream(std::uint64_t master, Stream purpose) {
  return Rng(derive_seed(master, purpose));
}

}  // namespace hgmlp

#endif  // HGMLP_RNG_H_
