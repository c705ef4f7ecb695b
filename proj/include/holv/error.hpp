#pragma once

#include <stdexcept>
#include <string>

namespace holv {

// Base of every error the library raises on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input: bad dimensions, non-finite values, broken files.
class InputError : public Error {
public:
    using Error::Error;
};

// A method's hypothesis does not hold for the given data
// (no S-certificate, a term that is not an M-tensor, q >= 0 for the bounds).
class NotApplicable : public Error {
public:
    using Error::Error;
};

// An iteration failed to converge or produced a non-finite value.
class NumericalFailure : public Error {
public:
    using Error::Error;
};

}  // namespace holv
