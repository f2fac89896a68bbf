#pragma once

#include <stdexcept>
#include <string>

namespace relaxkit {

// Invalid parameters or arguments outside a function's domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class QuadratureFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by series evaluators that hit their term cap without meeting the
// stopping rule.
class ConvergenceFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& reason)
      : std::runtime_error("line " + std::to_string(line) + ": " + reason),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class EmptyDataset : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateJacobian : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace relaxkit
