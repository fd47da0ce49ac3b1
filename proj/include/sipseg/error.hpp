#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sipseg {

enum class ErrorCode {
  FileNotFound,
  MalformedHeader,
  NotGrayscale,
  Unwritable,
  ValueOutOfRange,
  ShapeMismatch,
  InvalidArgument,
  GeometryOutOfBounds,
  DegenerateInput,
  NoContour,
  AbsentClass,
  MagicMismatch,
  TruncatedFile,
  IndexOutOfWindow,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

/// Every failure in the library is reported as an Error carrying a stable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace sipseg
