#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace anc {

/// A computation produced a non-finite intermediate value.
class NumericError : public std::runtime_error {
public:
    NumericError(std::size_t step, const std::string& what)
        : std::runtime_error(what), step_(step) {}

    /// Loop index (sample or iteration) at which the value went non-finite.
    std::size_t step() const { return step_; }

private:
    std::size_t step_ = 0;
};

/// A file did not match its expected on-disk format.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Filesystem-level failure (missing file, unwritable path).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace anc
