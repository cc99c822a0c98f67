#pragma once

#include <stdexcept>
#include <string>

namespace impopt {

enum class ErrorKind {
  InvalidArgument,
  BeyondHorizon,
  DegenerateCurve,
  DimensionMismatch,
  BlowUp,
  TimeIncomplete,
  Infeasible,
  NoConvergence,
  Parse,
};

const char* to_string(ErrorKind kind);

/// Exception carrying one of the library's named failure kinds.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace impopt
