#pragma once

#include <stdexcept>
#include <string>

namespace cooc {

/// Raised when an input file violates its documented layout: bad magic,
/// truncated payload, unsupported variant, version or invariant mismatch.
class format_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cooc
