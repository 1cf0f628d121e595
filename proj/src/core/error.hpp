#pragma once

#include <stdexcept>
#include <string>

namespace pressflow {

// Malformed input data or a violated data invariant. CLI exit code 2.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Filesystem / stream failure. CLI exit code 2.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid option combination detected below the argument parser. CLI exit code 1.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace pressflow
