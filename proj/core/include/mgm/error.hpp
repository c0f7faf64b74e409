#pragma once

#include <stdexcept>
#include <string>

namespace mgm {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Invalid model specification (factor model, coefficient array, options).
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure inside an estimator or sampler.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Raised by lambda_path when no penalized coefficient has a nonzero gradient.
class ZeroLambdaMaxError : public NumericalError {
 public:
  ZeroLambdaMaxError() : NumericalError("zero lambda_max") {}
};

/// Raised when the response is constant over the positively weighted rows.
class DegenerateResponseError : public NumericalError {
 public:
  DegenerateResponseError() : NumericalError("degenerate response") {}
};

/// Wraps an error raised while fitting the regression on one node.
class NodeError : public Error {
 public:
  NodeError(int node, const std::string& what)
      : Error("node " + std::to_string(node) + ": " + what), node_(node) {}
  int node() const { return node_; }

 private:
  int node_;
};

/// Malformed serialized document.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t byte)
      : Error(what + " (at byte " + std::to_string(byte) + ")"), byte_(byte) {}
  std::size_t byte() const { return byte_; }

 private:
  std::size_t byte_;
};

}  // namespace mgm
