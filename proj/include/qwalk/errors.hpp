#pragma once
#include <stdexcept>
#include <string>

namespace qwalk {

// Thrown when a numerical routine (eigensolver, optimizer) fails to converge
// or produces unusable output.
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a request exceeds a configured resource cap (e.g. dense matrix
// assembly beyond the allowed dimension).
struct capacity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a model fit cannot be performed (degenerate design, non-finite
// inputs, no convergence within the iteration budget).
struct fit_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a coin angle makes the transfer matrix singular (cos theta = 0).
struct singular_coin_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown for unreadable/unwritable files and malformed file content
// (bad CSV schema, non-numeric cells, missing columns).
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace qwalk
