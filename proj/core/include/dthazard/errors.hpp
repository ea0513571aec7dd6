#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dthazard {

// Broad failure classes; the CLI maps them onto process exit codes.
enum class ErrorKind {
  kUsage,      // bad arguments or configuration
  kData,       // input data invalid or unusable
  kExistence,  // NPMLE existence/uniqueness condition fails
  kNumerical,  // iteration or optimizer failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Thrown by sample validation; carries the index of the first bad triplet.
class ValidationError : public Error {
 public:
  ValidationError(std::size_t index, const std::string& what)
      : Error(ErrorKind::kData, what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class NonConvergence : public Error {
 public:
  explicit NonConvergence(const std::string& what)
      : Error(ErrorKind::kNumerical, what) {}
};

class OptimizerFailure : public Error {
 public:
  explicit OptimizerFailure(const std::string& what)
      : Error(ErrorKind::kNumerical, what) {}
};

class RejectionBudgetExceeded : public Error {
 public:
  explicit RejectionBudgetExceeded(const std::string& what)
      : Error(ErrorKind::kNumerical, what) {}
};

}  // namespace dthazard
