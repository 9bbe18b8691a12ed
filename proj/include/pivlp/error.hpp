#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pivlp {

enum class ErrorCode {
    InvalidArgument,
    LagOutOfRange,
    NotSymmetric,
    SingularToeplitz,
    PathSingular,
    DegenerateNormalizer,
    InsufficientReplicates,
    AlphaNotTabulated,
    SchemaMismatch,
    NonStationarySpec,
    ParseError,
    IoError,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries a machine-readable code so the
// CLI can emit structured error JSON.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

class SingularToeplitz : public Error {
public:
    SingularToeplitz(std::size_t order, const std::string& what)
        : Error(ErrorCode::SingularToeplitz, what), order_(order) {}
    std::size_t order() const noexcept { return order_; }

private:
    std::size_t order_;
};

class PathSingular : public Error {
public:
    PathSingular(double lambda, const std::string& what)
        : Error(ErrorCode::PathSingular, what), lambda_(lambda) {}
    double lambda() const noexcept { return lambda_; }

private:
    double lambda_;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error(ErrorCode::ParseError, what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

inline void require(bool cond, ErrorCode code, const std::string& msg) {
    if (!cond) throw Error(code, msg);
}

}  // namespace pivlp
