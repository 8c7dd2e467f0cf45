#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace nbd {

/// SplitMix64 finalizer; used to derive well-separated seeds from a path of ids.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stable stream ids. A derived seed is a function of (root, purpose, indices...),
/// so every (restart, coordinate, purpose) tuple owns an independent stream and
/// parallel execution cannot change any draw.
enum class Stream : std::uint64_t {
  joint = 1,
  loss_sim = 2,
  inner_loop = 3,
  restart_init = 4,
  emulator_point = 5,
  compare_current = 6,
  compare_proposed = 7,
  accept = 8,
  perturb = 9,
  prior_mc = 10,
  winner = 11,
};

constexpr std::uint64_t derive_seed(std::uint64_t root,
                                    std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = mix64(root ^ 0x6a09e667f3bcc909ULL);
  for (std::uint64_t p : path) s = mix64(s ^ mix64(p));
  return s;
}

constexpr std::uint64_t derive_seed(std::uint64_t root, Stream purpose,
                                    std::initializer_list<std::uint64_t> path = {}) {
  std::uint64_t s = derive_seed(root, {static_cast<std::uint64_t>(purpose)});
  for (std::uint64_t p : path) s = mix64(s ^ mix64(p));
  return s;
}

/// Random stream with self-contained variate generation. The standard library
/// distributions are implementation-defined, so uniform/normal/gamma are done
/// here by hand to keep results bit-reproducible across toolchains.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(mix64(seed)) {}

  std::mt19937_64& engine() { return gen_; }

  /// U(0,1), 53-bit mantissa, never exactly 0 or 1.
  double uniform() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// N(0,1) by Box-Muller (no cached second value; stateless per call).
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  /// Gamma(shape, 1) for shape >= 1, Marsaglia-Tsang squeeze.
  double gamma(double shape);

  /// Beta(a, b) via two gammas; requires a, b >= 1 (the Beta-Bernoulli
  /// posteriors used here always satisfy that).
  double beta(double a, double b) {
    double x = gamma(a);
    double y = gamma(b);
    return x / (x + y);
  }

  /// Index sampled with the given (normalized) probabilities, by CDF inversion.
  int categorical(std::span<const double> probs);

  /// Child seed for handing a derived stream to a callee.
  std::uint64_t next_seed() { return mix64(gen_()); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace nbd
