#pragma once

#include <stdexcept>
#include <string>

namespace agentbench {

/// Bad user input: malformed suite/registry/config files, failed invariants.
/// The CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Filesystem or stream failure. The CLI maps this to exit code 2.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace agentbench
