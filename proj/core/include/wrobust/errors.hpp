#pragma once

#include <stdexcept>
#include <string>

namespace wrobust {

/// Argument violates an operation's contract.
class InvalidInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Factorization hit a non-positive pivot; carries the failing pivot index.
class NotPositiveDefiniteError : public std::runtime_error {
 public:
  NotPositiveDefiniteError(const std::string& what, int pivot)
      : std::runtime_error(what), pivot_(pivot) {}
  int pivot() const noexcept { return pivot_; }

 private:
  int pivot_;
};

/// Operation invoked against stale or mismatched internal state.
class InvalidStateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Training objective became non-finite; carries the iteration index.
class TrainingDivergedError : public std::runtime_error {
 public:
  TrainingDivergedError(const std::string& what, int iteration)
      : std::runtime_error(what), iteration_(iteration) {}
  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wrobust
