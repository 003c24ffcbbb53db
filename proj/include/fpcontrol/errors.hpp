#pragma once

#include <stdexcept>
#include <string>

namespace fpc {

// Bad arguments, malformed files, violated preconditions.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A quantity that is mathematically undefined for the given inputs
// (e.g. an alpha percentage with zero observed significant results).
class UndefinedResult : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Iterative or search procedures that could not reach their target.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw InputError(what);
}

}  // namespace detail
}  // namespace fpc
