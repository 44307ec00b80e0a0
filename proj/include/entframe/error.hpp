#pragma once

#include <stdexcept>
#include <string>

namespace entframe {

enum class ErrorKind {
    IoError,
    MalformedRow,
    MissingDocument,
    OffsetMismatch,
    UnknownRole,
    OutOfBounds,
    MissingLlmClient,
    EmptyMention,
    ExtractionFailed,
    EmptyTrainingSet,
    UnknownLabel,
    DimensionMismatch,
    EmptyMainSubset,
    MissingGold,
    OverlappingAnnotations,
    MalformedJson,
    BadShape,
    MisalignedPredictions,
    SpecInvalid,
    ValidationError,
    ReplayMiss,
    HttpError,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::IoError: return "IoError";
        case ErrorKind::MalformedRow: return "MalformedRow";
        case ErrorKind::MissingDocument: return "MissingDocument";
        case ErrorKind::OffsetMismatch: return "OffsetMismatch";
        case ErrorKind::UnknownRole: return "UnknownRole";
        case ErrorKind::OutOfBounds: return "OutOfBounds";
        case ErrorKind::MissingLlmClient: return "MissingLlmClient";
        case ErrorKind::EmptyMention: return "EmptyMention";
        case ErrorKind::ExtractionFailed: return "ExtractionFailed";
        case ErrorKind::EmptyTrainingSet: return "EmptyTrainingSet";
        case ErrorKind::UnknownLabel: return "UnknownLabel";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::EmptyMainSubset: return "EmptyMainSubset";
        case ErrorKind::MissingGold: return "MissingGold";
        case ErrorKind::OverlappingAnnotations: return "OverlappingAnnotations";
        case ErrorKind::MalformedJson: return "MalformedJson";
        case ErrorKind::BadShape: return "BadShape";
        case ErrorKind::MisalignedPredictions: return "MisalignedPredictions";
        case ErrorKind::SpecInvalid: return "SpecInvalid";
        case ErrorKind::ValidationError: return "ValidationError";
        case ErrorKind::ReplayMiss: return "ReplayMiss";
        case ErrorKind::HttpError: return "HttpError";
    }
    return "Error";
}

/// Library-wide exception. `kind()` identifies the failure class so callers
/// can map it to exit codes or assert on it in tests.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace entframe
