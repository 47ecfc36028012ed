#pragma once

#include <stdexcept>
#include <string>

namespace locrel {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// UE closer to a BS than min_bs_distance; the free-space gain diverges.
class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

/// Model is rank-deficient by construction (e.g. zero excess delay).
class SingularModel : public Error {
 public:
  using Error::Error;
};

/// A linear system or matrix inversion is numerically singular.
class IllConditioned : public Error {
 public:
  using Error::Error;
};

class OutOfMapRange : public Error {
 public:
  using Error::Error;
};

class QuantileUnresolvable : public Error {
 public:
  using Error::Error;
};

class InsufficientSamples : public Error {
 public:
  using Error::Error;
};

/// Calibration cannot satisfy the meta-probability bound anywhere in range.
class Infeasible : public Error {
 public:
  using Error::Error;
};

class InvalidDomain : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace locrel
