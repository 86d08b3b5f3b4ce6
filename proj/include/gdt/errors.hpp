#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gdt {

/// Base of all library errors. `exit_code()` is what the CLI returns.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual int exit_code() const noexcept { return 2; }
};

/// Violated operation precondition: invalid label, universe mismatch,
/// arity mismatch, wrong node kind.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Invalid experiment/learner configuration or CLI usage.
class SpecError : public Error {
public:
    using Error::Error;
};

class DataError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 3; }
};

/// Malformed input document. `line` is 1-based; 0 when unknown.
class ParseError : public DataError {
public:
    ParseError(const std::string& what, std::size_t line)
        : DataError(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Identical feature vectors carry different labels; no consistent tree exists.
class NoConsistentTreeError : public DataError {
public:
    using DataError::DataError;
};

class BudgetError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 4; }
};

}  // namespace gdt
