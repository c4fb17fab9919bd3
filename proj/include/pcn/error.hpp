#pragma once

#include <stdexcept>
#include <string>

namespace pcn {

// Base of all library errors. ValidationError maps to CLI exit code 1,
// ComputationError (search-space guards) to exit code 2.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ValidationError : Error {
  using Error::Error;
};

struct ComputationError : Error {
  using Error::Error;
};

struct UnknownNodeError : ValidationError {
  explicit UnknownNodeError(const std::string& id)
      : ValidationError("unknown node: " + id) {}
};

struct SelfLoopError : ValidationError {
  explicit SelfLoopError(const std::string& id)
      : ValidationError("self-loop channel on node: " + id) {}
};

struct NegativeBalanceError : ValidationError {
  using ValidationError::ValidationError;
};

struct SingletonGraphError : ValidationError {
  SingletonGraphError() : ValidationError("graph has a single node") {}
};

struct SameNodeError : ValidationError {
  explicit SameNodeError(const std::string& id)
      : ValidationError("source and target coincide: " + id) {}
};

struct EmptyBudgetError : ValidationError {
  using ValidationError::ValidationError;
};

struct BudgetExceededError : ValidationError {
  using ValidationError::ValidationError;
};

struct NoFeasibleCandidateError : ValidationError {
  NoFeasibleCandidateError()
      : ValidationError("no candidate channel satisfies the positivity precondition") {}
};

struct BadSizeError : ValidationError {
  using ValidationError::ValidationError;
};

struct SpaceTooLargeError : ComputationError {
  using ComputationError::ComputationError;
};

struct DivisionSpaceTooLargeError : ComputationError {
  using ComputationError::ComputationError;
};

struct TooLargeError : ComputationError {
  using ComputationError::ComputationError;
};

}  // namespace pcn
