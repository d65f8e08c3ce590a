#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace countkit {

enum class ErrorCode {
    domain,
    evaluation,
    parse,
    io,
};

std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
  public:
    explicit DomainError(const std::string& what) : Error(ErrorCode::domain, what) {}
};

// A well-posed evaluation that the numerics refuse to carry out (cancellation,
// budget, non-convergence). The message says which alternative path to use.
class EvaluationError : public Error {
  public:
    explicit EvaluationError(const std::string& what) : Error(ErrorCode::evaluation, what) {}
};

class ParseError : public Error {
  public:
    ParseError(std::size_t line, const std::string& what)
        : Error(ErrorCode::parse, "line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

class IoError : public Error {
  public:
    explicit IoError(const std::string& what) : Error(ErrorCode::io, what) {}
};

}  // namespace countkit
