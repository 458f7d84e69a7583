#pragma once

#include <stdexcept>
#include <string>

namespace rht {

// Root of every error the library throws.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Image header could not be parsed.
class FormatError : public Error {
public:
  using Error::Error;
};

// Header parsed but the pixel payload ended early.
class TruncatedError : public Error {
public:
  using Error::Error;
};

// Well-formed input using a feature we do not handle (e.g. maxval != 255).
class UnsupportedError : public Error {
public:
  using Error::Error;
};

class TooSmallError : public Error {
public:
  using Error::Error;
};

class EmptyHistogramError : public Error {
public:
  using Error::Error;
};

// The detector was handed an edge map with no foreground.
class NoEdgesError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

} // namespace rht
