#include "absde/error.hpp"

namespace absde {

std::string_view error_code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::AnticipationOutOfRange: return "AnticipationOutOfRange";
    case ErrorCode::InvalidResolution: return "InvalidResolution";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SingularRegression: return "SingularRegression";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EvalError: return "EvalError";
    case ErrorCode::UnknownBuiltin: return "UnknownBuiltin";
    case ErrorCode::MissingParams: return "MissingParams";
    case ErrorCode::DivergedSweep: return "DivergedSweep";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::WindowMisaligned: return "WindowMisaligned";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

namespace {

std::string format_parse_message(std::size_t position, const std::vector<std::string>& expected,
                                 const std::string& detail) {
    std::string msg = "parse error at position " + std::to_string(position) + ": " + detail;
    if (!expected.empty()) {
        msg += " (expected one of:";
        for (const auto& e : expected) msg += " " + e;
        msg += ")";
    }
    return msg;
}

}  // namespace

ParseError::ParseError(std::size_t position, std::vector<std::string> expected, const std::string& detail)
    : Error(ErrorCode::ParseError, format_parse_message(position, expected, detail)),
      position_(position),
      expected_(std::move(expected)) {}

}  // namespace absde
