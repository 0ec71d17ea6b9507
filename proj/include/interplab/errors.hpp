#pragma once

#include <stdexcept>
#include <string>

namespace interplab {

// Machine-readable failure taxonomy. The CLI maps codes to exit status:
// usage/input problems exit 1, numerical/runtime failures exit 2.
enum class ErrorCode {
    Input,              // malformed request or rejected dataset
    DatasetParse,       // unreadable/invalid CSV
    Precondition,       // documented operation precondition violated
    Unsupported,        // valid request outside implemented scope
    Conditioning,       // retry budget exhausted without an acceptable system
    InfeasibleEstimate, // certified estimate incompatible with the request
    NotFound,           // search exhausted without a witness
    Internal,           // invariant breach; always a bug
};

inline const char* error_code_name(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::Input: return "INPUT";
    case ErrorCode::DatasetParse: return "DATASET_PARSE";
    case ErrorCode::Precondition: return "PRECONDITION";
    case ErrorCode::Unsupported: return "UNSUPPORTED";
    case ErrorCode::Conditioning: return "CONDITIONING";
    case ErrorCode::InfeasibleEstimate: return "INFEASIBLE_ESTIMATE";
    case ErrorCode::NotFound: return "NOT_FOUND";
    case ErrorCode::Internal: return "INTERNAL";
    }
    return "INTERNAL";
}

// Usage-class failures (bad request, bad data) versus runtime-class failures
// (a well-posed request the numerics could not honor).
inline bool error_code_is_usage(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::Input:
    case ErrorCode::DatasetParse:
    case ErrorCode::Precondition:
    case ErrorCode::Unsupported:
        return true;
    default:
        return false;
    }
}

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

// Retry budget exhausted; carries the best condition number encountered so
// callers can report how close the search came.
class ConditioningError : public Error {
  public:
    ConditioningError(const std::string& message, double best_condition, int rounds)
        : Error(ErrorCode::Conditioning, message),
          best_condition_(best_condition),
          rounds_(rounds) {}

    double best_condition() const noexcept { return best_condition_; }
    int rounds() const noexcept { return rounds_; }

  private:
    double best_condition_;
    int rounds_;
};

// A derivative-witness search failed; carries the best candidate so the
// caller can report how close it came to the tolerance.
class NotFoundError : public Error {
  public:
    NotFoundError(const std::string& message, double best_point, double best_margin)
        : Error(ErrorCode::NotFound, message),
          best_point_(best_point),
          best_margin_(best_margin) {}

    double best_point() const noexcept { return best_point_; }
    double best_margin() const noexcept { return best_margin_; }

  private:
    double best_point_;
    double best_margin_;
};

} // namespace interplab
