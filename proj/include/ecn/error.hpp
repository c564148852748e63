#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ecn {

/// Failure categories. Each one maps to a distinct CLI exit code.
enum class ErrorCode {
  EmptyMatrix = 10,
  ShapeMismatch = 11,
  NonFinite = 12,
  ZeroNormRow = 13,
  InvalidDistance = 14,
  InvalidParams = 20,
  ParamsTooLarge = 21,
  DegenerateSimilarity = 22,
  IndexOutOfRange = 23,
  NoValidQueries = 30,
  BadMagic = 40,
  UnsupportedVersion = 41,
  TruncatedFile = 42,
  DuplicateIndex = 43,
  UnknownRole = 44,
  IndexGap = 45,
  ParseError = 46,
  IoError = 47,
  BadParams = 50,
  TooLargeForOracle = 51,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

}  // namespace ecn
