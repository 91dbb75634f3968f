#pragma once

#include <stdexcept>
#include <string>

namespace bicons {

// Error categories map one-to-one onto the CLI exit codes.
enum class ErrorKind {
  usage,        // bad arguments, mismatched types, incompatible config
  domain,       // argument outside the mathematical domain of a formula
  degeneracy,   // rank-deficient or near-singular input
  construction, // infeasible initial data for a profile/surface
  numerical,    // integrator or solver failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct UsageError : Error {
  explicit UsageError(const std::string& w) : Error(ErrorKind::usage, w) {}
};
struct DomainError : Error {
  explicit DomainError(const std::string& w) : Error(ErrorKind::domain, w) {}
};
struct DegeneracyError : Error {
  explicit DegeneracyError(const std::string& w)
      : Error(ErrorKind::degeneracy, w) {}
};
struct ConstructionError : Error {
  explicit ConstructionError(const std::string& w)
      : Error(ErrorKind::construction, w) {}
};
struct NumericalError : Error {
  explicit NumericalError(const std::string& w)
      : Error(ErrorKind::numerical, w) {}
};

}  // namespace bicons
