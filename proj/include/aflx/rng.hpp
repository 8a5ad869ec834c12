#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace aflx {

// splitmix64 finalizer; good avalanche, cheap.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Independent engine for (seed, stream, counter). Each Monte Carlo trial gets
// its own engine keyed by its index, so results do not depend on how trials
// are ordered or split across threads.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream,
                                 std::uint64_t counter) {
  std::uint64_t k = mix64(seed ^ mix64(stream ^ mix64(counter)));
  return std::mt19937_64(k);
}

// Uniform double in [0, 1) with exactly 53 random bits. Used instead of the
// standard distributions so output is identical across standard libraries.
inline double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n) by rejection; unbiased and portable.
inline std::uint64_t uniform_below(std::mt19937_64& g, std::uint64_t n) {
  if (n == 0) return 0;
  std::uint64_t limit = ~0ULL - (~0ULL % n);
  for (;;) {
    std::uint64_t v = g();
    if (v < limit) return v % n;
  }
}

// Samples an index from a finite distribution by inverse CDF on precomputed
// cumulative sums. The last bucket absorbs rounding slack.
inline std::size_t sample_cdf(std::mt19937_64& g, const std::vector<double>& cdf) {
  double u = uniform01(g);
  for (std::size_t i = 0; i + 1 < cdf.size(); ++i)
    if (u < cdf[i]) return i;
  return cdf.size() - 1;
}

// cumulative sums of probs; cdf.back() is forced to 1.
inline std::vector<double> make_cdf(const std::vector<double>& probs) {
  std::vector<double> cdf(probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    cdf[i] = acc;
  }
  if (!cdf.empty()) cdf.back() = 1.0;
  return cdf;
}

}  // namespace aflx
