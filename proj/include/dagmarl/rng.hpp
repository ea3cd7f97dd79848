#ifndef DAGMARL_RNG_HPP_
#define DAGMARL_RNG_HPP_

#include <cstdint>
#include <random>
#include <string_view>

namespace dagmarl {

using Rng = std::mt19937_64;

uint64_t splitmix64(uint64_t x) noexcept;

// Seed for the named sub-stream `name` of `master`. Streams are keyed by
// name only, so adding or removing a stream never shifts the others.
uint64_t derive_seed(uint64_t master, std::string_view name) noexcept;
uint64_t derive_seed(uint64_t master, std::string_view name,
                     uint64_t index) noexcept;

inline Rng make_rng(uint64_t master, std::string_view name) {
  return Rng(derive_seed(master, name));
}

// Uniform double in [0, 1) built from the top 53 bits; unlike
// std::uniform_real_distribution its output is fixed by the engine alone.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n) by rejection sampling; n > 0.
uint64_t uniform_index(Rng& rng, uint64_t n);

}  // namespace dagmarl

#endif  // DAGMARL_RNG_HPP_
