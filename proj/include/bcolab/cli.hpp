#pragma once

#include <iosfwd>

namespace bcolab::cli {

/// Batch runner behind the `bcolab` binary. Commands: verify, replay, psi,
/// msa, explore, simulate. Returns 0 on success, 1 on verification failures
/// or runtime errors, 2 on configuration errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bcolab::cli
