#pragma once

#include <stdexcept>
#include <string>

namespace acap {

// Base class for every error the library raises on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input files; messages carry file and line context.
class ParseError : public Error {
public:
    using Error::Error;
};

// Domain invariant violations: out-of-range label, dangling reference,
// shape mismatch, empty inputs.
class ValidationError : public Error {
public:
    using Error::Error;
};

// An agreement statistic is undefined on the given data, e.g. every rating
// falls into a single category.
class DegenerateStatistic : public Error {
public:
    using Error::Error;
};

} // namespace acap
