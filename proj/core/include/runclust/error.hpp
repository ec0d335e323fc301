#pragma once

#include <stdexcept>
#include <string>

namespace runclust {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller passed an argument outside the documented domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Input data (files, series) is malformed or violates an invariant.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A statistic needs more events or samples than are available.
class InsufficientData : public Error {
 public:
  using Error::Error;
};

}  // namespace runclust
