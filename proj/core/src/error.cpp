#include "uca/error.hpp"

namespace uca {

std::string_view code_name(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::WeightSumInvalid: return "WEIGHT_SUM_INVALID";
    case ErrorCode::WeightNegative: return "WEIGHT_NEGATIVE";
    case ErrorCode::ToolMissing: return "TOOL_MISSING";
    case ErrorCode::ConfigInvalid: return "CONFIG_INVALID";
    case ErrorCode::KeyMissing: return "KEY_MISSING";
    case ErrorCode::ValueOutOfRange: return "VALUE_OUT_OF_RANGE";
    case ErrorCode::ValueNotInteger: return "VALUE_NOT_INTEGER";
    case ErrorCode::MalformedXml: return "MALFORMED_XML";
    case ErrorCode::NoTestResult: return "NO_TEST_RESULT";
    case ErrorCode::SummaryMissing: return "SUMMARY_MISSING";
    case ErrorCode::ViolationsExceedObjects: return "VIOLATIONS_EXCEED_OBJECTS";
    case ErrorCode::NoHost: return "NO_HOST";
    case ErrorCode::EmptyResult: return "EMPTY_RESULT";
    case ErrorCode::EmptyDatabase: return "EMPTY_DATABASE";
    case ErrorCode::CvssOutOfRange: return "CVSS_OUT_OF_RANGE";
    case ErrorCode::WeightMismatch: return "WEIGHT_MISMATCH";
    case ErrorCode::TooFewAssessments: return "TOO_FEW_ASSESSMENTS";
    case ErrorCode::ToolNotFound: return "TOOL_NOT_FOUND";
    case ErrorCode::TimeoutExceeded: return "TIMEOUT_EXCEEDED";
    case ErrorCode::UnexpectedExitCode: return "UNEXPECTED_EXIT_CODE";
    case ErrorCode::OutputMissing: return "OUTPUT_MISSING";
    case ErrorCode::DuplicateTool: return "DUPLICATE_TOOL";
    case ErrorCode::AlreadyInitialized: return "ALREADY_INITIALIZED";
    case ErrorCode::IoFailure: return "IO_FAILURE";
    case ErrorCode::SerializationFailure: return "SERIALIZATION_FAILURE";
    }
    return "UNKNOWN";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(code_name(code)) + ": " + detail)
    , code_(code)
    , detail_(detail)
{
}

} // namespace uca
