#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace nlcoh {

// Independent random streams keyed by (master seed, purpose, index), so a
// frame's realisation does not depend on how many frames came before it.
enum class Stream : std::uint64_t { input = 1, noise = 2, weights = 3, shuffle = 4 };

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t index = 0) {
  return splitmix64(splitmix64(splitmix64(master) ^ static_cast<std::uint64_t>(stream)) + index);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t master, Stream stream, std::uint64_t index = 0)
      : engine_(derive_seed(master, stream, index)) {}

  // Uniform on [0, 1) from the top 53 bits; independent of the library's
  // distribution implementations.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t next() { return engine_(); }
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)); }

 private:
  std::mt19937_64 engine_;
};

// Fisher-Yates shuffle of `rows` for one epoch.
inline std::vector<std::size_t> shuffled_rows(std::vector<std::size_t> rows, std::uint64_t seed,
                                              std::size_t epoch) {
  Rng rng(seed, Stream::shuffle, epoch);
  for (std::size_t i = rows.size(); i > 1; --i) std::swap(rows[i - 1], rows[rng.below(i)]);
  return rows;
}

}  // namespace nlcoh
