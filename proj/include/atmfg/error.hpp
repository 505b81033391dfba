#pragma once

#include <stdexcept>
#include <string>

namespace atmfg {

// Base of every library error. Subclasses map one-to-one onto CLI exit codes.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
  using Error::Error;
};

// Wrong matrix shape or vector length.
class DimensionError : public Error {
public:
  using Error::Error;
};

class BoundsError : public Error {
public:
  using Error::Error;
};

// Input too small (N < 4) or too large for the exact builder.
class SizeError : public Error {
public:
  using Error::Error;
};

class ParameterError : public Error {
public:
  using Error::Error;
};

// Malformed graph input (asymmetric adjacency, self-loops, disconnected graph).
class StructureError : public Error {
public:
  using Error::Error;
};

// Two inputs that should describe the same node set do not.
class InputMismatchError : public Error {
public:
  using Error::Error;
};

// Broken engine invariant. Never expected in a correct build.
class InternalError : public Error {
public:
  using Error::Error;
};

} // namespace atmfg
