#pragma once

#include <stdexcept>
#include <string>

namespace fairfront {

// Base class for all library errors. `code()` is a short stable identifier
// used by the CLI for structured stderr lines and exit-code mapping.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& msg)
        : std::runtime_error(msg), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

// A ratio-type measure hit a zero denominator (e.g. DI with fnr = 1).
struct UndefinedRatio : Error {
    explicit UndefinedRatio(const std::string& msg) : Error("undefined_ratio", msg) {}
};

// A conditioning class has zero mass, so class-conditional rates do not exist.
struct DegenerateClass : Error {
    explicit DegenerateClass(const std::string& msg) : Error("degenerate_class", msg) {}
};

// A fairness level is outside the representable range for the chosen form.
struct InvalidLevel : Error {
    explicit InvalidLevel(const std::string& msg) : Error("invalid_level", msg) {}
};

// Catch-all for violated preconditions on values (masses, probabilities, grids).
struct InvalidArgument : Error {
    explicit InvalidArgument(const std::string& msg) : Error("invalid_argument", msg) {}
};

struct EmptySample : Error {
    explicit EmptySample(const std::string& msg) : Error("empty_sample", msg) {}
};

// Requested label channel has no rows (e.g. conditioning on y = 1 with no positives).
struct EmptyChannel : Error {
    explicit EmptyChannel(const std::string& msg) : Error("empty_channel", msg) {}
};

// Training produced a non-finite objective or parameters.
struct NonFinite : Error {
    explicit NonFinite(const std::string& msg) : Error("non_finite", msg) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error("parse_error", msg) {}
};

struct SchemaMismatch : Error {
    explicit SchemaMismatch(const std::string& msg) : Error("schema_mismatch", msg) {}
};

struct NonBinaryLabel : Error {
    explicit NonBinaryLabel(const std::string& msg) : Error("non_binary_label", msg) {}
};

struct TooSmall : Error {
    explicit TooSmall(const std::string& msg) : Error("too_small", msg) {}
};

struct IoError : Error {
    explicit IoError(const std::string& msg) : Error("io_error", msg) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error("config_error", msg) {}
};

struct InfeasibleConstraint : Error {
    explicit InfeasibleConstraint(const std::string& msg) : Error("infeasible", msg) {}
};

} // namespace fairfront
