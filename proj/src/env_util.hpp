#ifndef DAGMARL_SRC_ENV_UTIL_HPP_
#define DAGMARL_SRC_ENV_UTIL_HPP_

#include <bit>
#include <cstdint>
#include <string_view>

#include "dagmarl/rng.hpp"

namespace dagmarl::detail {

// Folds configuration fields into a 64-bit identity for snapshots.
class FingerprintBuilder {
 public:
  explicit FingerprintBuilder(std::string_view kind) : h_(derive_seed(0, kind)) {}

  FingerprintBuilder& add(uint64_t x) {
    h_ = splitmix64(h_ ^ splitmix64(x + 0x9e3779b97f4a7c15ULL));
    return *this;
  }
  FingerprintBuilder& add(int x) { return add(static_cast<uint64_t>(static_cast<int64_t>(x))); }
  FingerprintBuilder& add(double x) { return add(std::bit_cast<uint64_t>(x)); }

  uint64_t value() const { return h_; }

 private:
  uint64_t h_;
};

}  // namespace dagmarl::detail

#endif  // DAGMARL_SRC_ENV_UTIL_HPP_
