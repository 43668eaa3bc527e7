#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace fcp {

// Seedable generator with platform-independent draws. std::mt19937_64 output
// is fully specified by the standard, but the std:: distributions are not, so
// every draw used by the library goes through the helpers below.
class Rng {
 public:
  Rng() : Rng(0) {}
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64() { return engine_(); }

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);
  int below(int n) { return static_cast<int>(below(static_cast<std::uint64_t>(n))); }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform();

  double normal();

  // Samples an index from a discrete distribution that sums to ~1.
  int categorical(std::span<const double> probs);

  // Independent child stream; the parent is not advanced.
  Rng fork(std::uint64_t tag) const;

  std::uint64_t seed() const { return seed_; }

  bool operator==(const Rng& other) const { return engine_ == other.engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

// Derives a stable seed from a base seed and a tag.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag);

}  // namespace fcp
