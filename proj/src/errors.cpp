#include "sgntk/errors.hpp"

namespace sgntk {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NotPositiveDefinite: return "NotPositiveDefinite";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::NonFinite: return "NonFinite";
    case Errc::InvalidScale: return "InvalidScale";
    case Errc::InvalidCov: return "InvalidCov";
    case Errc::ZeroDiagonal: return "ZeroDiagonal";
    case Errc::NonParallelRequired: return "NonParallelRequired";
    case Errc::MissingSurrogate: return "MissingSurrogate";
    case Errc::NonFiniteLoss: return "NonFiniteLoss";
    case Errc::DivergentKernel: return "DivergentKernel";
    case Errc::SingularGram: return "SingularGram";
    case Errc::PreconditionViolated: return "PreconditionViolated";
    case Errc::ParseError: return "ParseError";
    case Errc::SchemaMismatch: return "SchemaMismatch";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void raise(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace sgntk
