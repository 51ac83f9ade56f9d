#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace uca {

enum class ErrorCode {
    // weight profile / configuration
    WeightSumInvalid,
    WeightNegative,
    ToolMissing,
    ConfigInvalid,
    // parsers
    KeyMissing,
    ValueOutOfRange,
    ValueNotInteger,
    MalformedXml,
    NoTestResult,
    SummaryMissing,
    ViolationsExceedObjects,
    NoHost,
    // scoring
    EmptyResult,
    EmptyDatabase,
    CvssOutOfRange,
    // analysis
    WeightMismatch,
    TooFewAssessments,
    // runner
    ToolNotFound,
    TimeoutExceeded,
    UnexpectedExitCode,
    OutputMissing,
    DuplicateTool,
    AlreadyInitialized,
    // store
    IoFailure,
    SerializationFailure,
};

/// Stable upper-case identifier, e.g. "WEIGHT_SUM_INVALID".
std::string_view code_name(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above;
/// what() renders as "CODE: detail".
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail);

    ErrorCode code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

} // namespace uca
