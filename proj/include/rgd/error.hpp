#pragma once

#include <stdexcept>
#include <string>

namespace rgd {

// All library failures derive from rgd::Error so callers can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class SizeCapExceeded : public Error {
 public:
  using Error::Error;
};

// Raised by exact_spectrum when H is proportional to the identity.
class ZeroGap : public Error {
 public:
  using Error::Error;
};

// Raised by approximation_ratio when E0 >= 0; use the residual stop rule.
class UseResidualRule : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

inline void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionMismatch(std::string(what) + ": dimension mismatch (" +
                            std::to_string(a) + " vs " + std::to_string(b) +
                            ")");
  }
}

}  // namespace detail
}  // namespace rgd
