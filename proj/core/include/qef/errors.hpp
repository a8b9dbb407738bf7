// errors.hpp: exception taxonomy shared by the library and the CLI exit codes.
#pragma once

#include <stdexcept>
#include <string>

namespace qef {

// Bad user input: malformed config, violated invariants, dimension mismatches.
// The CLI maps this to exit code 2.
class config_error : public std::invalid_argument {
public:
    explicit config_error(const std::string& what) : std::invalid_argument(what) {}
};

// A numerical procedure failed to converge or produced an unusable result.
// The CLI maps this to exit code 3.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

// A requested problem exceeds the configured size budget. CLI exit code 4.
class dimension_cap_error : public std::runtime_error {
public:
    explicit dimension_cap_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace qef
