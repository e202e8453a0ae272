#include "ncmap/errors.hpp"

namespace ncmap {

const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NotSkewSymmetric: return "NotSkewSymmetric";
        case ErrorKind::NotNormal: return "NotNormal";
        case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
        case ErrorKind::BadPeriod: return "BadPeriod";
        case ErrorKind::ZeroSumViolated: return "ZeroSumViolated";
        case ErrorKind::SearchExhausted: return "SearchExhausted";
        case ErrorKind::TargetsInfeasible: return "TargetsInfeasible";
        case ErrorKind::InterlacingViolated: return "InterlacingViolated";
        case ErrorKind::IncompatibleParams: return "IncompatibleParams";
        case ErrorKind::ConstraintViolation: return "ConstraintViolation";
        case ErrorKind::WronskianFailed: return "WronskianFailed";
        case ErrorKind::DomainError: return "DomainError";
        case ErrorKind::NonFiniteObjective: return "NonFiniteObjective";
        case ErrorKind::ConfigError: return "ConfigError";
        case ErrorKind::NumericFailure: return "NumericFailure";
    }
    return "Unknown";
}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::IncompatibleParams:
        case ErrorKind::ConstraintViolation:
        case ErrorKind::WronskianFailed:
        case ErrorKind::ConfigError:
        case ErrorKind::BadPeriod:
            return 2;
        case ErrorKind::SearchExhausted:
            return 3;
        default:
            return 4;
    }
}

}  // namespace ncmap
