#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace altroute::rng {

/// Deterministic 64-bit generator (SplitMix64). Used everywhere a seeded
/// stream is needed: std::shuffle / std::uniform_int_distribution are
/// implementation-defined, so reproducibility across platforms requires a
/// fixed generator and fixed sampling code.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform integer in [0, bound), bound >= 1. Rejection sampling, unbiased.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  /// Uniform double in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

/// Seeded Fisher-Yates permutation of {0, ..., n-1}.
inline std::vector<std::size_t> permutation(std::size_t n, SplitMix64& gen) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(gen.next_below(i));
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

namespace detail {
inline std::uint64_t fnv1a_init() { return 0xcbf29ce484222325ULL; }
inline void fnv1a_feed(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
}
inline std::uint64_t splitmix_finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Seed splitter: hash64 over the mixed fields (FNV-1a, SplitMix64
/// finalizer). Fixed for the life of the file formats; documented in the
/// README config reference.
class SeedMixer {
 public:
  explicit SeedMixer(std::uint64_t root) : h_(detail::fnv1a_init()) { mix(root); }

  SeedMixer& mix(std::uint64_t v) {
    detail::fnv1a_feed(h_, &v, sizeof(v));
    return *this;
  }
  SeedMixer& mix(std::string_view s) {
    detail::fnv1a_feed(h_, s.data(), s.size());
    const unsigned char sep = 0xff;  // length-ambiguity guard between fields
    detail::fnv1a_feed(h_, &sep, 1);
    return *this;
  }

  std::uint64_t seed() const { return detail::splitmix_finalize(h_); }

 private:
  std::uint64_t h_;
};

inline std::uint64_t mix_seed(std::uint64_t root, std::string_view tag, std::uint64_t a = 0,
                              std::uint64_t b = 0) {
  return SeedMixer(root).mix(tag).mix(a).mix(b).seed();
}

}  // namespace altroute::rng
