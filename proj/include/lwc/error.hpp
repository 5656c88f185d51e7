#pragma once

#include <stdexcept>
#include <string>

namespace lwc {

// Base of every error thrown by the library. The CLI maps the subclasses
// onto exit codes (invalid input -> 2, non-convergence -> 3).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A size cap (canonicalization, enumeration, population) was exceeded.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

class NotConverged : public Error {
 public:
  using Error::Error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidInput(what);
}

}  // namespace lwc
