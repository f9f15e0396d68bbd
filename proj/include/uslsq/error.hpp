#pragma once

#include <stdexcept>
#include <string>

namespace uslsq {

// Bad input or parameters: unreadable data, out-of-range arguments,
// unsupported orders.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// The input is well formed but fails a structural check (a square that is not
// semi-Latin, a design that is not affine resolvable, ...).
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(what) {}
};

}  // namespace uslsq
