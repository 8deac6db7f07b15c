#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace polarsep {

/// Raised when a measurement angle set cannot determine all five unknowns.
class DegenerateAngleSet : public std::runtime_error {
public:
    DegenerateAngleSet(int rank, double cond, const std::string& what)
        : std::runtime_error(what), rank_(rank), cond_(cond) {}

    int rank() const noexcept { return rank_; }
    double cond() const noexcept { return cond_; }

private:
    int rank_ = 0;
    double cond_ = std::numeric_limits<double>::infinity();
};

/// Malformed or truncated file content (PFM payloads, manifests).
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Images or stacks whose sizes do not line up.
class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace polarsep
