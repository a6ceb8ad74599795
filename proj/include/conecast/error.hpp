#pragma once

#include <stdexcept>
#include <string>

namespace conecast {

enum class ErrorCode {
    // model / validation
    ShapeMismatch,
    EmptyOutput,
    BadHead,
    InfeasibleShape,
    // persistence / input files
    FormatError,
    SizeMismatch,
    Io,
    // engine
    NonzeroBias,
    UnsupportedLayer,
    TooManyRows,
    TooManyElements,
    LengthMismatch,
    NonFiniteInput,
    NotOneDimensional,
    IncompleteInput,
    // metrics
    EmptyTrace,
};

const char* error_code_name(ErrorCode c);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

} // namespace conecast
