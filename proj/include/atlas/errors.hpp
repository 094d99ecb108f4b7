#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace atlas {

/// Exact integer type for group and automorphism orders.
using Integer = boost::multiprecision::cpp_int;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// Raised when a configured element, subset or search cap would be exceeded.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

inline std::uint64_t to_u64(const Integer& value) {
  if (value < 0 || value > std::numeric_limits<std::uint64_t>::max())
    throw Error("integer does not fit in 64 bits: " + value.str());
  return value.convert_to<std::uint64_t>();
}

}  // namespace atlas
