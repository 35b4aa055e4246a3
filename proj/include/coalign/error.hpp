#pragma once

#include <stdexcept>
#include <string>

namespace coalign {

// Every failure the library can report. The CLI maps these onto exit
// codes 2..9 (see tools/coalign_cli.cpp and README).
enum class ErrorKind {
    MissingInput,
    ParseError,
    PlanInvalid,
    EmptySpeech,
    Infeasible,
    FormatError,
    DimError,
    InvalidActionId,
    NonFiniteInput,
    EmptyInput,
    TooLarge,
    ConstraintViolation,
    Internal,
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::MissingInput: return "MissingInput";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::PlanInvalid: return "PlanInvalid";
        case ErrorKind::EmptySpeech: return "EmptySpeech";
        case ErrorKind::Infeasible: return "Infeasible";
        case ErrorKind::FormatError: return "FormatError";
        case ErrorKind::DimError: return "DimError";
        case ErrorKind::InvalidActionId: return "InvalidActionId";
        case ErrorKind::NonFiniteInput: return "NonFiniteInput";
        case ErrorKind::EmptyInput: return "EmptyInput";
        case ErrorKind::TooLarge: return "TooLarge";
        case ErrorKind::ConstraintViolation: return "ConstraintViolation";
        case ErrorKind::Internal: return "Internal";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

    // CLI exit code for this failure class (2..9).
    int exit_code() const {
        switch (kind_) {
            case ErrorKind::MissingInput: return 2;
            case ErrorKind::ParseError: return 3;
            case ErrorKind::FormatError: return 3;
            case ErrorKind::PlanInvalid: return 4;
            case ErrorKind::InvalidActionId: return 4;
            case ErrorKind::EmptySpeech: return 5;
            case ErrorKind::Infeasible: return 6;
            case ErrorKind::DimError: return 7;
            case ErrorKind::NonFiniteInput: return 8;
            case ErrorKind::EmptyInput: return 8;
            case ErrorKind::TooLarge: return 8;
            case ErrorKind::ConstraintViolation: return 9;
            case ErrorKind::Internal: return 9;
        }
        return 9;
    }

private:
    ErrorKind kind_;
};

}  // namespace coalign
