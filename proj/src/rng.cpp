#include "ionlink/rng.hpp"

#include <cmath>

#include "ionlink/types.hpp"

namespace ionlink {

namespace {
uint64_t splitmix64(uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace

Rng::Rng(uint64_t seed) {
  uint64_t s = seed;
  std::seed_seq seq{static_cast<uint32_t>(splitmix64(s)), static_cast<uint32_t>(splitmix64(s)),
                    static_cast<uint32_t>(splitmix64(s)), static_cast<uint32_t>(splitmix64(s))};
  gen_.seed(seq);
}

Rng Rng::substream(uint64_t seed, uint64_t index) {
  uint64_t s = seed ^ (0xd1b54a32d192ed03ULL * (index + 1));
  return Rng(splitmix64(s));
}

double Rng::uniform() {
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * 3.14159265358979323846 * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

int Rng::categorical(const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0 || !std::isfinite(w)) throw ValidationError("categorical: bad weight");
    total += w;
  }
  if (total <= 0.0) throw ValidationError("categorical: weights sum to zero");
  double x = uniform() * total;
  for (size_t i = 0; i + 1 < weights.size(); ++i) {
    x -= weights[i];
    if (x < 0.0) return static_cast<int>(i);
  }
  return static_cast<int>(weights.size()) - 1;
}

std::vector<long long> Rng::multinomial(long long n, const std::vector<double>& weights) {
  std::vector<long long> counts(weights.size(), 0);
  for (long long i = 0; i < n; ++i) ++counts[static_cast<size_t>(categorical(weights))];
  return counts;
}

long long Rng::geometric(double p) {
  if (p <= 0.0 || p > 1.0) throw ValidationError("geometric: p must be in (0, 1]");
  if (p == 1.0) return 1;
  double u = 0.0;
  while (u <= 0.0) u = uniform();
  const double k = std::floor(std::log(u) / std::log1p(-p));
  return 1 + static_cast<long long>(k);
}

size_t Rng::index(size_t n) {
  return static_cast<size_t>(uniform() * static_cast<double>(n)) % n;
}

}  // namespace ionlink
