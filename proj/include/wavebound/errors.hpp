#pragma once

#include <stdexcept>
#include <string>

namespace wavebound {

enum class ErrorKind { validation, range, domain, convergence, resource, structure, verification };

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

struct ValidationError : Error {
  explicit ValidationError(const std::string& m) : Error(ErrorKind::validation, m) {}
};

struct RangeError : Error {
  explicit RangeError(const std::string& m) : Error(ErrorKind::range, m) {}
};

struct DomainError : Error {
  explicit DomainError(const std::string& m) : Error(ErrorKind::domain, m) {}
};

struct StructureError : Error {
  explicit StructureError(const std::string& m) : Error(ErrorKind::structure, m) {}
};

struct VerificationFailure : Error {
  explicit VerificationFailure(const std::string& m) : Error(ErrorKind::verification, m) {}
};

// Iteration ran out of budget. `partial` is the last value reached and
// `achieved` the last increment or bracket width.
struct ConvergenceError : Error {
  ConvergenceError(const std::string& m, double partial_value, double achieved_tol)
      : Error(ErrorKind::convergence, m), partial(partial_value), achieved(achieved_tol) {}
  double partial;
  double achieved;
};

// Window or depth cap exceeded. Carries the last integer bracket seen.
struct ResourceError : Error {
  ResourceError(const std::string& m, long lo, long hi)
      : Error(ErrorKind::resource, m), bracket_lo(lo), bracket_hi(hi) {}
  long bracket_lo;
  long bracket_hi;
};

}  // namespace wavebound
