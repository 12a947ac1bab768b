#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mutabench {

enum class ErrorKind {
    FileNotFound,
    MalformedRecord,
    EmptyCorpus,
    ParseError,
    SampleCountMismatch,
    EmptyInput,
    MixedK,
    TransportError,
    AuthError,
    BudgetExhausted,
    SandboxSetup,
    Usage,
    GateFailed,
};

const char* to_string(ErrorKind kind);

// Base for every failure the harness reports as an error (as opposed to a
// verdict or report content).
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ParseError : public Error {
public:
    ParseError(const std::string& reason, int line, int column)
        : Error(ErrorKind::ParseError,
                "parse error at " + std::to_string(line) + ":" + std::to_string(column) + ": " + reason),
          reason_(reason), line_(line), column_(column) {}

    const std::string& reason() const noexcept { return reason_; }
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    std::string reason_;
    int line_;
    int column_;
};

class MalformedRecord : public Error {
public:
    MalformedRecord(std::size_t line, const std::string& reason)
        : Error(ErrorKind::MalformedRecord,
                "malformed record at line " + std::to_string(line) + ": " + reason),
          line_(line), reason_(reason) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::size_t line_;
    std::string reason_;
};

}  // namespace mutabench
