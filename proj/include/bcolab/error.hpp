#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bcolab {

enum class Errc {
  NoIntersection,
  Unbounded,
  ZeroDirection,
  XInsideBody,
  RejectionFailure,
  DegenerateFacet,
  NoConvergence,
  EpsTooSmall,
  BisectionFailure,
  WindowMiss,
  MassMismatch,
  MissingMinValue,
  ZeroVariance,
  CoverTooLarge,
  EmptyInset,
  EmptyPosterior,
  ZeroInformation,
  InvalidArgument,
  VersionMismatch,
};

std::string_view errc_name(Errc code) noexcept;

// Every failure raised by the library carries one of the codes above so that
// callers (CLI, bindings, verifiers) can branch on the condition without
// string matching.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

inline void require(bool cond, Errc code, const char* what) {
  if (!cond) throw Error(code, what);
}

inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

}  // namespace bcolab
