#pragma once

#include <stdexcept>
#include <string>

namespace camsim {

enum class ErrorCode {
  kInvalidArgument,
  kDisjointGrids,
  kWrongUnit,
  kBadMagic,
  kTruncatedPayload,
  kDimensionMismatch,
  kIo,
  kSingularMatrix,
  kUnsupportedCfa,
  kValidation,
  kConfig,
};

const char* to_string(ErrorCode code);

/// Exception carrying a machine-checkable code alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace camsim
