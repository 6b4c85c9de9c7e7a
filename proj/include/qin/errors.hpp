#pragma once

#include <stdexcept>
#include <string>

namespace qin {

// Thrown when an operation needs a supercritical process (b > 1) or a rarity
// regime outside what the construction covers.
struct UnsupportedRegime : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Inputs that are structurally valid but numerically unusable, e.g. a lambda
// value below 1e-300 that would be divided by.
struct DegenerateInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidHorizon : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutOfHorizon : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct HorizonMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonConvergence : std::runtime_error {
    NonConvergence(const std::string& msg, double last)
        : std::runtime_error(msg), last_iterate(last) {}
    double last_iterate;
};

}  // namespace qin
