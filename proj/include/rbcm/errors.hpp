#pragma once

#include <stdexcept>
#include <string>

namespace rbcm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An operation was applied to a machine that does not meet its documented
/// requirements (wrong counter count, stay cycles, unmarked input, ...).
class PreconditionViolated : public Error {
public:
    using Error::Error;
};

class NondeterministicInput : public PreconditionViolated {
public:
    NondeterministicInput() : PreconditionViolated("machine is not deterministic") {}
    explicit NondeterministicInput(const std::string& what) : PreconditionViolated(what) {}
};

class NotPrefixFree : public PreconditionViolated {
public:
    NotPrefixFree() : PreconditionViolated("language is not prefix-free") {}
};

class InfiniteBudget : public PreconditionViolated {
public:
    InfiniteBudget() : PreconditionViolated("operation requires a finite reversal bound") {}
};

class AlphabetMismatch : public PreconditionViolated {
public:
    using PreconditionViolated::PreconditionViolated;
};

class UnknownEntry : public Error {
public:
    explicit UnknownEntry(const std::string& name) : Error("unknown corpus entry: " + name) {}
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& message)
        : Error("line " + std::to_string(line) + ": " + message), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace rbcm
