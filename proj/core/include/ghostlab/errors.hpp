#pragma once

#include <stdexcept>
#include <string>

namespace ghostlab {

/// Root of every error raised by the simulation library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (negative distance, empty grid, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The grid is too coarse (or too fine) for the requested Fresnel propagation.
class AliasingError : public Error {
 public:
  using Error::Error;
};

/// An element map does not cover the support of the field it is applied to.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

/// Object sits in the focal plane: the image is at infinity.
class DegenerateImage : public Error {
 public:
  using Error::Error;
};

/// Monte Carlo estimate too noisy for the requested statistic.
class InsufficientRealizations : public Error {
 public:
  using Error::Error;
};

/// A sampling table has no probability mass.
class DegenerateDensity : public Error {
 public:
  using Error::Error;
};

/// A map has no background margin from which a contrast can be estimated.
class NoMargin : public Error {
 public:
  using Error::Error;
};

/// Malformed file (PGM, GLF1, event stream).
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace ghostlab
