#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace unsolv {

/// Base for every recoverable failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DivisionByZero : public Error {
public:
    DivisionByZero() : Error("division by zero") {}
};

class Overflow : public Error {
public:
    explicit Overflow(const std::string& what) : Error("integer overflow in " + what) {}
};

class ExhaustedAttempts : public Error {
public:
    explicit ExhaustedAttempts(const std::string& what) : Error("exhausted attempts: " + what) {}
};

class ResourceLimit : public Error {
public:
    explicit ResourceLimit(const std::string& what) : Error("resource limit exceeded: " + what) {}
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class EmptyInput : public InvalidArgument {
public:
    explicit EmptyInput(const std::string& what) : InvalidArgument("empty input: " + what) {}
};

class DimensionMismatch : public InvalidArgument {
public:
    explicit DimensionMismatch(const std::string& what) : InvalidArgument("dimension mismatch: " + what) {}
};

class CannotBlock : public Error {
public:
    explicit CannotBlock(const std::string& what) : Error("cannot block maze: " + what) {}
};

class MissingCorrectness : public InvalidArgument {
public:
    MissingCorrectness() : InvalidArgument("answer response scored without a correctness verdict") {}
};

class GroupTooSmall : public InvalidArgument {
public:
    explicit GroupTooSmall(std::size_t size)
        : InvalidArgument("reward group needs at least 2 entries, got " + std::to_string(size)) {}
};

class UnknownDomain : public Error {
public:
    explicit UnknownDomain(const std::string& what) : Error("unknown or ungradable domain: " + what) {}
};

class EmptyTrace : public InvalidArgument {
public:
    EmptyTrace() : InvalidArgument("simulation trace is empty") {}
};

class OracleError : public Error {
public:
    explicit OracleError(const std::string& what) : Error("oracle error: " + what) {}
};

class PlanParseError : public Error {
public:
    explicit PlanParseError(const std::string& what) : Error("plan parse error: " + what) {}
};

class EmptyOutput : public Error {
public:
    explicit EmptyOutput(const std::string& what) : Error("empty oracle output: " + what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error("i/o error: " + what) {}
};

class SchemaError : public Error {
public:
    SchemaError(std::size_t line, const std::string& what)
        : Error("schema error at line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace unsolv
