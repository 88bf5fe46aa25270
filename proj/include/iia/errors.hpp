#pragma once

#include <stdexcept>
#include <string>

namespace iia {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live in different variable catalogs or scalar contexts.
class ContextMismatch : public Error {
 public:
  using Error::Error;
};

/// A precondition on the arguments of an operation does not hold.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Text or JSON input could not be parsed.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// The channel realization hits a measure-zero degenerate set
/// (unexpected rank, vanishing minor).
class NonGenericInstance : public Error {
 public:
  using Error::Error;
};

/// Rank-1-plus-diagonal family with alpha == 1.
class DegenerateChannel : public Error {
 public:
  using Error::Error;
};

/// The requested (scheme, K, M, mode) combination has no construction.
class Unsupported : public Error {
 public:
  using Error::Error;
};

/// A MIMO destination ended up with a singular combining matrix.
class SingularCombining : public Error {
 public:
  using Error::Error;
};

/// Rejection sampling ran out of retries.
class SamplerExhausted : public Error {
 public:
  using Error::Error;
};

}  // namespace iia
