#ifndef EFCAP_ERROR_HPP
#define EFCAP_ERROR_HPP

#include <stdexcept>
#include <string>

namespace efcap {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on the inputs does not hold.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A requested target lies outside the attained range of a map (for example a
/// cap radius that no regular solution reaches).
class OutOfRange : public Error {
 public:
  using Error::Error;
};

/// Integration or iteration did not produce a trustworthy result.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace efcap

#endif  // EFCAP_ERROR_HPP
