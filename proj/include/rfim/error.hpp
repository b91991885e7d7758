#pragma once

#include <stdexcept>
#include <string>

namespace rfim {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-domain input (bad index, bad parameter, wrong convention).
class InputError : public Error {
 public:
  using Error::Error;
};

/// The request exceeds a hard enumeration cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// A pinning or conditioning event has probability zero.
class InfeasibleError : public InputError {
 public:
  using InputError::InputError;
};

/// Two independent numerical routes disagreed beyond tolerance.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A validation run finished but missed its target.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace rfim
