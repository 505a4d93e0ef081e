#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace cayley {

// Group payloads and word counts are arbitrary-precision: short encodings
// reach elements of magnitude 2^n, which outgrows fixed-width integers fast.
using Int = boost::multiprecision::cpp_int;

// Raised on malformed arguments, bad files, mismatched alphabets. CLI exit 2.
struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when an enumeration or construction exceeds a configured cap. CLI exit 3.
struct cap_exceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::int64_t to_i64(const Int& v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
    throw cap_exceeded("integer too large for a machine word");
  return static_cast<std::int64_t>(v);
}

}  // namespace cayley
