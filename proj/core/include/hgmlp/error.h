#ifndef HGMLP_ERROR_H_
#define HGMLP_ERROR_H_

#include <stdexcept>
#include <string>

namespace hgmlp {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments, inconsistent shapes, malformed structures.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Unreadable or malformed files.
class IoError : public Error {
 public:
  using Error::Error;
};

// A computation produced NaN/Inf (e.g. training divergence).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace hgmlp

#endif  // HGMLP_ERROR_H_
