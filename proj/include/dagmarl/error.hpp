#ifndef DAGMARL_ERROR_HPP_
#define DAGMARL_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace dagmarl {

// Numeric values are part of the C API (see dagmarl.h) and must not be
// renumbered.
enum class ErrorCode : int {
  kOk = 0,
  kCycleDetected = 1,
  kEmptyGraph = 2,
  kInvalidNode = 3,
  kInvalidArc = 4,
  kDimensionMismatch = 5,
  kNonFiniteInput = 6,
  kShapeMismatch = 7,
  kNonFiniteGradient = 8,
  kNonFiniteParams = 9,
  kEmptyBatch = 10,
  kNonFiniteLoss = 11,
  kInvalidTopology = 12,
  kInvalidAction = 13,
  kVersionMismatch = 14,
  kInvalidDistribution = 15,
  kStateSpaceTooLarge = 16,
  kInadmissibleContribution = 17,
  kHypothesisViolated = 18,
  kSnapshotRequired = 19,
  kConfigError = 20,
  kIoError = 21,
  kEmptySeries = 22,
  kCheckpointMismatch = 23,
  kSchemaMismatch = 24,
  kInvalidArgument = 25,
  kInternal = 26,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace dagmarl

#endif  // DAGMARL_ERROR_HPP_
