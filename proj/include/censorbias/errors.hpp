#pragma once

#include <stdexcept>
#include <string>

namespace censorbias {

/// Invalid model specification or argument outside an operation's domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Missing or malformed columns in tabular input.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A cell that cannot be interpreted (non-numeric time, NA, negative derived time).
class ValueError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Partial-likelihood maximization failed (flat or monotone likelihood).
class NonConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace censorbias
