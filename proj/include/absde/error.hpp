#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace absde {

enum class ErrorCode {
    AnticipationOutOfRange,
    InvalidResolution,
    InvalidArgument,
    SingularRegression,
    ParseError,
    EvalError,
    UnknownBuiltin,
    MissingParams,
    DivergedSweep,
    NoConvergence,
    WindowMisaligned,
    SchemaError,
    IoError,
};

std::string_view error_code_name(ErrorCode code);

/// Base class of every error raised by the library. The code is stable and
/// machine-readable; the message is for humans.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }
    std::string_view code_name() const { return error_code_name(code_); }

private:
    ErrorCode code_;
};

/// Expression syntax error. `position` is a 0-based byte offset into the source.
class ParseError : public Error {
public:
    ParseError(std::size_t position, std::vector<std::string> expected, const std::string& detail);

    std::size_t position() const noexcept { return position_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    std::size_t position_;
    std::vector<std::string> expected_;
};

/// Config document error; `path` is a JSON-path such as `$.solver.paths`.
class SchemaError : public Error {
public:
    SchemaError(std::string path, const std::string& detail)
        : Error(ErrorCode::SchemaError, "at " + path + ": " + detail), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace absde
