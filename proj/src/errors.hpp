#pragma once

#include <stdexcept>
#include <string>

namespace ycv {

/// Error categories, mirrored one-to-one by the C API status codes.
enum class ErrorCode {
  kInvalidArgument = 1,  // bad parameters, violated preconditions
  kParse = 2,            // malformed CSV / config input
  kData = 3,             // structurally valid input the model cannot accept
  kNumeric = 4,          // scaling failures, unsolvable quadratics, non-finite results
  kIo = 5,               // file system failures
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace ycv
