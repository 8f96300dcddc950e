// Copyright (c) 2026 @squid consultancy group (scg)
// All rights reserved.
// licensed under the apache license 2.0.

/**
 * @file errors.hpp
 * @brief Error types shared across the library
 */

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nucseg {

/// Input violates an operation precondition (dimension mismatch, bad range, ...).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Byte stream does not conform to a codec format. Carries the offending byte offset.
class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& message, std::size_t byte_offset)
        : std::runtime_error(message + " (byte offset " + std::to_string(byte_offset) + ")"),
          byte_offset_(byte_offset) {}

    std::size_t byte_offset() const { return byte_offset_; }

private:
    std::size_t byte_offset_;
};

/// Generator could not satisfy the requested geometry within its attempt budget.
class CapacityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace nucseg
