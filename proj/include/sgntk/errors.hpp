#pragma once

#include <stdexcept>
#include <string>

namespace sgntk {

enum class Errc {
  InvalidArgument,
  DimensionMismatch,
  NotPositiveDefinite,
  NoConvergence,
  NonFinite,
  InvalidScale,
  InvalidCov,
  ZeroDiagonal,
  NonParallelRequired,
  MissingSurrogate,
  NonFiniteLoss,
  DivergentKernel,
  SingularGram,
  PreconditionViolated,
  ParseError,
  SchemaMismatch,
};

const char* to_string(Errc code) noexcept;

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void raise(Errc code, const std::string& what);

}  // namespace sgntk
