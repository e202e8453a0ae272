#pragma once

#include <stdexcept>
#include <string>

namespace ncmap {

enum class ErrorKind {
    NotSkewSymmetric,
    NotNormal,
    ConvergenceFailure,
    BadPeriod,
    ZeroSumViolated,
    SearchExhausted,
    TargetsInfeasible,
    InterlacingViolated,
    IncompatibleParams,
    ConstraintViolation,
    WronskianFailed,
    DomainError,
    NonFiniteObjective,
    ConfigError,
    NumericFailure,
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// CLI exit code for an error kind.
int exit_code_for(ErrorKind kind);

}  // namespace ncmap
