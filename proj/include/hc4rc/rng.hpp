#pragma once

// std::shuffle and the std distributions are implementation-defined, so two
// standard libraries can disagree on the same seed. mt19937_64's output
// sequence is fixed by the standard; everything here is built on that alone.

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace hc4rc {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform integer in [0, bound), bound > 0. Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
    std::uint64_t draw = engine_();
    while (draw >= limit) draw = engine_();
    return draw % bound;
  }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Independent stream for a sub-task (fold, class) of a seeded run.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) { return seed + index; }

}  // namespace hc4rc
