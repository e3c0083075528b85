#pragma once

#include <stdexcept>

namespace codiffuse {

// Invalid parameters or configuration; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A random structure could not be generated within its retry budget.
class GenerationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace codiffuse
