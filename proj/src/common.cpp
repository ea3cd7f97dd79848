#include "dagmarl/error.hpp"
#include "dagmarl/rng.hpp"

namespace dagmarl {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kOk: return "Ok";
    case ErrorCode::kCycleDetected: return "CycleDetected";
    case ErrorCode::kEmptyGraph: return "EmptyGraph";
    case ErrorCode::kInvalidNode: return "InvalidNode";
    case ErrorCode::kInvalidArc: return "InvalidArc";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNonFiniteInput: return "NonFiniteInput";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kNonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::kNonFiniteParams: return "NonFiniteParams";
    case ErrorCode::kEmptyBatch: return "EmptyBatch";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kInvalidTopology: return "InvalidTopology";
    case ErrorCode::kInvalidAction: return "InvalidAction";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kInvalidDistribution: return "InvalidDistribution";
    case ErrorCode::kStateSpaceTooLarge: return "StateSpaceTooLarge";
    case ErrorCode::kInadmissibleContribution: return "InadmissibleContribution";
    case ErrorCode::kHypothesisViolated: return "HypothesisViolated";
    case ErrorCode::kSnapshotRequired: return "SnapshotRequired";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kEmptySeries: return "EmptySeries";
    case ErrorCode::kCheckpointMismatch: return "CheckpointMismatch";
    case ErrorCode::kSchemaMismatch: return "SchemaMismatch";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kInternal: return "Internal";
  }
  return "Unknown";
}

uint64_t splitmix64(uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

uint64_t fnv1a(std::string_view s) noexcept {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

uint64_t derive_seed(uint64_t master, std::string_view name) noexcept {
  return splitmix64(splitmix64(master) ^ fnv1a(name));
}

uint64_t derive_seed(uint64_t master, std::string_view name,
                     uint64_t index) noexcept {
  return splitmix64(derive_seed(master, name) + splitmix64(index + 1));
}

uint64_t uniform_index(Rng& rng, uint64_t n) {
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % n;
}

}  // namespace dagmarl
