#pragma once
// Exception hierarchy shared by the whole library. Everything derives from
// releap::Error so callers can catch one type at the harness boundary.

#include <stdexcept>
#include <string>

namespace releap {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid or inconsistent configuration (bad field values, impossible budgets).
struct ConfigError : Error {
    using Error::Error;
};

// Dimension mismatch between a model and the data it is applied to.
struct ShapeError : Error {
    using Error::Error;
};

// Metric undefined on the given data (single class, no comparable pairs).
struct MetricError : Error {
    using Error::Error;
};

// Caller violated an operation precondition.
struct PreconditionError : Error {
    using Error::Error;
};

// A structural invariant was broken mid-run (re-query, budget overrun, ...).
struct InvariantError : Error {
    using Error::Error;
};

// Non-finite values surfaced during optimization or inference.
struct NumericError : Error {
    using Error::Error;
};

// File could not be opened, read, or written.
struct IoError : Error {
    using Error::Error;
};

}  // namespace releap
