#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace hemobnn {

// Mixes a seed with stream identifiers into an independent 64-bit seed.
// Every random stream in the library (split, init, per-iteration draws,
// per-item predictions, per-volunteer synthesis) is keyed this way, so
// results never depend on call order or thread scheduling.
std::uint64_t derive_seed(std::uint64_t seed,
                          std::initializer_list<std::uint64_t> stream);

// Deterministic generator. mt19937_64 is bit-specified by the standard; the
// distributions below are implemented here rather than taken from <random>
// because the standard distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer on [0, n); n > 0.
  std::uint64_t uniform_index(std::uint64_t n);
  // Standard normal (Marsaglia polar method).
  double normal();
  void fill_normal(std::span<double> out);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Fisher-Yates shuffle driven by Rng.
template <typename T>
void shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_index(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace hemobnn
