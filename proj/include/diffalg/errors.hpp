#ifndef DIFFALG_ERRORS_HPP
#define DIFFALG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace diffalg {

// Base class for every error thrown by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input: shape mismatches, mixed scalar fields,
// unparsable strings, violated preconditions.  Mathematical *verdicts*
// (an axiom that fails, a cocycle that is not a cocycle) are returned as
// reports, not thrown as errors.
class invalid_input_error : public error {
public:
    using error::error;
};

// A computation was refused because it would exceed the configured degree
// budget.  Never silently truncates.
class resource_error : public error {
public:
    using error::error;
};

// Exact division by zero.
class division_by_zero_error : public error {
public:
    using error::error;
};

// An internal consistency check failed.  Indicates a bug in the library,
// not a problem with the input.
class internal_error : public error {
public:
    using error::error;
};

} // namespace diffalg

#endif
