#pragma once

#include <stdexcept>
#include <string>

namespace ipikit {

// Thrown when an operation's preconditions are violated (bad parameter,
// data too short, malformed distribution, ...). Callers that need to
// distinguish I/O failures from analysis failures should catch IoError first.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// File-system / parsing-of-missing-resource failures.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace ipikit
