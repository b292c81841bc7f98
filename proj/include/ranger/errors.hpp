#pragma once

#include <stdexcept>
#include <string>

namespace ranger {

enum class ErrorKind {
    parameter,
    encoding,
    io,
    parse,
    format,
    build,
    verification,
};

/// Base of every error thrown by the library. The kind drives CLI exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ParameterError : public Error {
public:
    explicit ParameterError(const std::string& what) : Error(ErrorKind::parameter, what) {}
};

class EncodingError : public Error {
public:
    explicit EncodingError(const std::string& what) : Error(ErrorKind::encoding, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(ErrorKind::parse, what + " (line " + std::to_string(line) + ")"), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class BuildError : public Error {
public:
    explicit BuildError(const std::string& what) : Error(ErrorKind::build, what) {}
};

enum class FormatFault {
    bad_magic,
    bad_version,
    truncated,
    bad_checksum,
    bad_layout,
    bad_model,
    non_monotonic_ranges,
};

/// Index-file decoding failure; `fault()` tells the failure classes apart.
class FormatError : public Error {
public:
    FormatError(FormatFault fault, const std::string& what) : Error(ErrorKind::format, what), fault_(fault) {}
    FormatFault fault() const noexcept { return fault_; }

private:
    FormatFault fault_;
};

class VerificationError : public Error {
public:
    explicit VerificationError(const std::string& what) : Error(ErrorKind::verification, what) {}
};

} // namespace ranger
