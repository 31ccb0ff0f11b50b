#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace ionlink {

/// Deterministic random stream. All distributions are implemented on top
/// of the raw 64-bit output so that fixed seeds give bit-identical results
/// on every platform, and worker streams derived from (seed, index) are
/// independent of scheduling.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  /// Independent stream for worker `index` of a run seeded with `seed`.
  static Rng substream(uint64_t seed, uint64_t index);

  uint64_t next_u64() { return gen_(); }
  double uniform();  // [0, 1)
  double normal();   // standard normal (Box-Muller)

  /// Index drawn proportionally to nonnegative weights (need not sum to 1).
  int categorical(const std::vector<double>& weights);
  std::vector<long long> multinomial(long long n, const std::vector<double>& weights);
  /// Geometric trial count, support {1, 2, ...}, success probability p.
  long long geometric(double p);
  size_t index(size_t n);  // uniform in [0, n)

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[index(i)]);
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace ionlink
