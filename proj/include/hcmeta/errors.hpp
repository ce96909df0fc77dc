#pragma once

#include <stdexcept>
#include <string>

namespace hcmeta {

// Bad parameters or malformed input (CLI exit code 2).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A size cap or work budget would be exceeded (CLI exit code 3).
class Refusal : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numerical failure such as a singular Laplacian.
class SolveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hcmeta
