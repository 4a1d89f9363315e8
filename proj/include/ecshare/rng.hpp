#ifndef ECSHARE_RNG_HPP
#define ECSHARE_RNG_HPP

// Random streams, algorithm "ecshare-rng-v1":
//   stream seed = splitmix64(scenario_seed XOR fnv1a64(label))
//   engine      = std::mt19937_64 seeded with the stream seed
//   uniform01   = (engine() >> 11) * 2^-53
// Every draw is defined from raw engine output so sequences are identical across
// standard libraries (std distributions are implementation-defined).
// The greedy-order stream is used as a hash key instead of an engine: slot
// (g, r) at event time t sorts by
//   splitmix64(seed' ^ splitmix64(bits(t)) ^ splitmix64(~(g << 32 | r))).

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace ecshare {

inline constexpr std::string_view kRngAlgorithm = "ecshare-rng-v1 (splitmix64 + mt19937_64)";

namespace stream {
inline constexpr std::string_view kArrivals = "arrivals";
inline constexpr std::string_view kSizes = "sizes";
inline constexpr std::string_view kValues = "values";
inline constexpr std::string_view kBudgets = "budgets";
inline constexpr std::string_view kGreedyOrder = "greedy-order";
}  // namespace stream

[[nodiscard]] constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) noexcept {
  return splitmix64(seed ^ fnv1a64(label));
}

class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::string_view label) : engine_(derive_seed(seed, label)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on [lo, hi]; returns lo exactly when lo == hi.
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

  /// Uniform integer on [0, n) by rejection.
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return r % n;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ecshare

#endif  // ECSHARE_RNG_HPP
