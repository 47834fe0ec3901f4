#pragma once

#include <concepts>
#include <cstdint>
#include <random>

namespace spnjd {

/// Draws needed by the stochastic engines. Tests substitute deterministic
/// sources (e.g. zero noise, no jumps) through this interface.
template <class S>
concept RandomSource = requires(S& s, double rate) {
  { s.normal() } -> std::convertible_to<double>;
  { s.exponential(rate) } -> std::convertible_to<double>;
  { s.uniform() } -> std::convertible_to<double>;
};

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// One reproducible stream, keyed by (seed, stream index).
class StreamSource {
 public:
  StreamSource(std::uint64_t seed, std::uint64_t stream) : engine_(mix64(mix64(seed) ^ mix64(~stream))) {}

  double normal() { return normal_(engine_); }
  /// Exp(rate) draw; rate must be > 0.
  double exponential(double rate) { return exp_(engine_) / rate; }
  /// Uniform on [0, 1).
  double uniform() { return uniform_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
  std::exponential_distribution<double> exp_;
  std::uniform_real_distribution<double> uniform_;
};

static_assert(RandomSource<StreamSource>);

}  // namespace spnjd
