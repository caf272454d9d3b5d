#ifndef PIBI_ERRORS_HPP
#define PIBI_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pibi {

enum class ErrorCode {
  InvalidArgument,
  MissingCorrelator,
  SizeLimit,
  Overflow,
  SolverFailure,
  NoViolation,
  NonConvergence,
  InvalidCertificate,
  DegreeOverflow,
  DegenerateVariance,
  JsonFormat,
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

} // namespace pibi

#endif
