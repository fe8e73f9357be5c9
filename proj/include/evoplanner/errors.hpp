#pragma once

#include <stdexcept>
#include <string>

namespace evoplanner {

struct InvalidSpecError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct OutOfDomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PlacementError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace evoplanner
