#pragma once

#include <stdexcept>
#include <string>

namespace bohmflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidGrid : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

/// The grid is too coarse (or too small) for the requested analytic state.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

class SpecialFunctionError : public Error {
 public:
  using Error::Error;
};

/// Evaluation at (or too close to) a nodal point of the field.
class NodeError : public Error {
 public:
  using Error::Error;
};

/// Phase unwrapping along a line hit a masked node.
class NodeOnLine : public NodeError {
 public:
  using NodeError::NodeError;
};

class DegenerateDensity : public Error {
 public:
  using Error::Error;
};

class MaskedBoundary : public Error {
 public:
  using Error::Error;
};

class MassLoss : public Error {
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

class IOError : public Error {
 public:
  using Error::Error;
};

}  // namespace bohmflow
