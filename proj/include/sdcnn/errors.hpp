#pragma once

#include <stdexcept>

namespace sdcnn {

// Invalid arguments to library operations (dimension mismatches, bad indices).
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Invalid experiment configuration (bad fractions, empty sweeps, unknown keys).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Unreadable or malformed input files.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite values where finite numbers are required (divergence, overflow).
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace sdcnn
