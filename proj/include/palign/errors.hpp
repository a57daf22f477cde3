#pragma once

#include <stdexcept>
#include <string>

namespace palign {

// Error taxonomy.  Each class maps to a distinct CLI exit code; library code
// throws, callers decide whether a condition is recoverable.

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SolverFailure : std::runtime_error {
  explicit SolverFailure(const std::string& msg) : std::runtime_error(msg) {}
};

struct BudgetExceeded : std::runtime_error {
  explicit BudgetExceeded(const std::string& msg) : std::runtime_error(msg) {}
};

struct Diverged : std::runtime_error {
  explicit Diverged(const std::string& msg) : std::runtime_error(msg) {}
};

struct NonSquare : std::invalid_argument {
  explicit NonSquare(const std::string& msg) : std::invalid_argument(msg) {}
};

struct DimensionMismatch : std::invalid_argument {
  explicit DimensionMismatch(const std::string& msg) : std::invalid_argument(msg) {}
};

struct NotSectorial : std::domain_error {
  explicit NotSectorial(const std::string& msg) : std::domain_error(msg) {}
};

struct NotLaplacian : std::invalid_argument {
  explicit NotLaplacian(const std::string& msg) : std::invalid_argument(msg) {}
};

struct NotStronglyConnected : std::domain_error {
  explicit NotStronglyConnected(const std::string& msg) : std::domain_error(msg) {}
};

struct InvalidSwap : std::invalid_argument {
  explicit InvalidSwap(const std::string& msg) : std::invalid_argument(msg) {}
};

struct MissingCertificate : std::logic_error {
  explicit MissingCertificate(const std::string& msg) : std::logic_error(msg) {}
};

struct EmptyPath : std::logic_error {
  explicit EmptyPath(const std::string& msg) : std::logic_error(msg) {}
};

struct TooLarge : std::invalid_argument {
  explicit TooLarge(const std::string& msg) : std::invalid_argument(msg) {}
};

}  // namespace palign
