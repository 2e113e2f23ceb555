#pragma once

#include <stdexcept>
#include <string>

namespace pinchlab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input outside the domain of an operation (non-positive warp, bad parameter).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Grid too coarse or too short for the requested derivatives.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

// A stated hypothesis of an estimate is violated by the input.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

// Malformed tensor input (asymmetric matrix, broken curvature symmetries).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

// Fixed-point or Picard iteration failed to contract.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace pinchlab
