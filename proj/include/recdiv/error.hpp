#pragma once

#include <stdexcept>
#include <string>

namespace recdiv {

// Error taxonomy. Every library failure derives from Error so callers can
// catch broadly; the CLI maps the subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input: bad files, invalid graphs, unknown ids.
class DataError : public Error {
 public:
  using Error::Error;
};

// A solver precondition on the groupings does not hold (e.g. the flow
// reduction was handed overlapping categories).
class GroupingError : public Error {
 public:
  using Error::Error;
};

// Violated mutation contract on a Solution (duplicate edge, full user,
// already-used edge).
class SolutionError : public Error {
 public:
  using Error::Error;
};

// Network-level failures of the flow solver.
class FlowError : public Error {
 public:
  using Error::Error;
};

class NegativeCycleError : public FlowError {
 public:
  using FlowError::FlowError;
};

// Instance exceeds a hard size or numeric limit (scale overflow, oracle
// enumeration guard).
class LimitError : public Error {
 public:
  using Error::Error;
};

}  // namespace recdiv
