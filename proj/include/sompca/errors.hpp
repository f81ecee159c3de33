#pragma once

#include <stdexcept>
#include <string>

namespace sompca {

// Error taxonomy. The CLI maps these onto its exit codes:
// bounds/usage -> 2, malformed files -> 3, shape mismatches -> 4.

class ShapeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Requested more features than the variant/shape permits.
class FeatureBoundError : public ArgumentError {
public:
    FeatureBoundError(const std::string& msg, int bound)
        : ArgumentError(msg), bound_(bound) {}
    int bound() const { return bound_; }

private:
    int bound_;
};

// The deflation basis already spans the whole space; no feasible direction left.
class FeasibilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class FileFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace sompca
