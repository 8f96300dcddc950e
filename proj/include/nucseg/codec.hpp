// Copyright (c) 2026 @squid consultancy group (scg)
// All rights reserved.
// licensed under the apache license 2.0.

/**
 * @file codec.hpp
 * @brief Bit-exact file codecs: binary PGM (P5) and the sf32 scalar-field format
 *
 * PGM headers are parsed strictly: "P5\n<width> <height>\n<maxval>\n" with
 * single whitespace exactly as shown and no comment support. maxval <= 255
 * means one byte per sample; 256..65535 means two bytes big-endian (Netpbm
 * convention). Trailing bytes after the payload are rejected.
 *
 * sf32 is a little-endian raw format: magic "SFLD", then width and height as
 * 32-bit unsigned integers, then width*height IEEE 754 binary32 values in
 * row-major order. Fields round-trip bit-exactly for binary32-representable
 * cell values (everything read from an sf32 file is).
 */

#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "nucseg/errors.hpp"
#include "nucseg/raster.hpp"

namespace nucseg {
namespace codec {

using Bytes = std::vector<std::uint8_t>;

namespace detail {

// Dimension guards; desk-scale artifact, not a whole-slide reader.
constexpr std::uint64_t kMaxDimension = 1'000'000;
constexpr std::uint64_t kMaxCells = 100'000'000;

struct PgmHeader {
    int width = 0;
    int height = 0;
    int maxval = 0;
    std::size_t payload_offset = 0;
    int bytes_per_sample = 1;
};

inline void expect_byte(const Bytes& bytes, std::size_t offset, char expected,
                        const char* what) {
    if (offset >= bytes.size()) {
        throw FormatError(std::string("unexpected end of data, expected ") + what, offset);
    }
    if (bytes[offset] != static_cast<std::uint8_t>(expected)) {
        throw FormatError(std::string("expected ") + what, offset);
    }
}

inline std::uint64_t parse_uint(const Bytes& bytes, std::size_t& offset, const char* what) {
    if (offset >= bytes.size() || bytes[offset] < '0' || bytes[offset] > '9') {
        throw FormatError(std::string("expected decimal ") + what, offset);
    }
    std::uint64_t value = 0;
    while (offset < bytes.size() && bytes[offset] >= '0' && bytes[offset] <= '9') {
        value = value * 10 + (bytes[offset] - '0');
        if (value > 10 * kMaxDimension) {
            throw FormatError(std::string(what) + " overflows", offset);
        }
        ++offset;
    }
    return value;
}

inline PgmHeader parse_pgm_header(const Bytes& bytes) {
    expect_byte(bytes, 0, 'P', "PGM magic 'P5'");
    expect_byte(bytes, 1, '5', "PGM magic 'P5'");
    expect_byte(bytes, 2, '\n', "newline after magic");
    std::size_t offset = 3;

    const std::size_t width_at = offset;
    const std::uint64_t width = parse_uint(bytes, offset, "width");
    expect_byte(bytes, offset, ' ', "single space between width and height");
    ++offset;
    const std::size_t height_at = offset;
    const std::uint64_t height = parse_uint(bytes, offset, "height");
    expect_byte(bytes, offset, '\n', "newline after dimensions");
    ++offset;
    const std::size_t maxval_at = offset;
    const std::uint64_t maxval = parse_uint(bytes, offset, "maxval");
    expect_byte(bytes, offset, '\n', "newline after maxval");
    ++offset;

    if (width < 1 || width > kMaxDimension) {
        throw FormatError("width out of range", width_at);
    }
    if (height < 1 || height > kMaxDimension) {
        throw FormatError("height out of range", height_at);
    }
    if (width * height > kMaxCells) {
        throw FormatError("dimension overflow: too many pixels", width_at);
    }
    if (maxval < 1 || maxval > 65535) {
        throw FormatError("maxval out of range 1..65535", maxval_at);
    }

    PgmHeader header;
    header.width = static_cast<int>(width);
    header.height = static_cast<int>(height);
    header.maxval = static_cast<int>(maxval);
    header.payload_offset = offset;
    header.bytes_per_sample = maxval <= 255 ? 1 : 2;
    return header;
}

inline void check_payload_size(const Bytes& bytes, std::size_t payload_offset,
                               std::uint64_t expected_bytes) {
    const std::uint64_t available = bytes.size() - payload_offset;
    if (available < expected_bytes) {
        throw FormatError("truncated payload", bytes.size());
    }
    if (available > expected_bytes) {
        throw FormatError("trailing bytes after payload", payload_offset + expected_bytes);
    }
}

inline int read_sample(const Bytes& bytes, std::size_t offset, int bytes_per_sample) {
    if (bytes_per_sample == 1) return bytes[offset];
    return (static_cast<int>(bytes[offset]) << 8) | bytes[offset + 1];
}

inline std::uint32_t read_u32_le(const Bytes& bytes, std::size_t offset) {
    return static_cast<std::uint32_t>(bytes[offset]) |
           (static_cast<std::uint32_t>(bytes[offset + 1]) << 8) |
           (static_cast<std::uint32_t>(bytes[offset + 2]) << 16) |
           (static_cast<std::uint32_t>(bytes[offset + 3]) << 24);
}

inline void append_u32_le(Bytes& bytes, std::uint32_t value) {
    bytes.push_back(static_cast<std::uint8_t>(value & 0xff));
    bytes.push_back(static_cast<std::uint8_t>((value >> 8) & 0xff));
    bytes.push_back(static_cast<std::uint8_t>((value >> 16) & 0xff));
    bytes.push_back(static_cast<std::uint8_t>((value >> 24) & 0xff));
}

} // namespace detail

// ============================================================================
// PGM (P5)
// ============================================================================

/// Decodes a P5 stream as a mask: sample 0 is background, anything else foreground.
inline raster::BinaryGrid read_pgm_binary(const Bytes& bytes) {
    const auto header = detail::parse_pgm_header(bytes);
    const std::uint64_t count =
        static_cast<std::uint64_t>(header.width) * header.height;
    detail::check_payload_size(bytes, header.payload_offset,
                               count * header.bytes_per_sample);
    raster::BinaryGrid grid(header.width, header.height);
    std::size_t offset = header.payload_offset;
    for (int y = 0; y < header.height; ++y) {
        for (int x = 0; x < header.width; ++x) {
            grid.set(x, y, detail::read_sample(bytes, offset, header.bytes_per_sample) != 0);
            offset += header.bytes_per_sample;
        }
    }
    return grid;
}

/// Decodes a P5 stream preserving integer sample values as instance labels.
inline raster::LabelMap read_pgm_label(const Bytes& bytes) {
    const auto header = detail::parse_pgm_header(bytes);
    const std::uint64_t count =
        static_cast<std::uint64_t>(header.width) * header.height;
    detail::check_payload_size(bytes, header.payload_offset,
                               count * header.bytes_per_sample);
    raster::LabelMap labels(header.width, header.height);
    std::size_t offset = header.payload_offset;
    for (int y = 0; y < header.height; ++y) {
        for (int x = 0; x < header.width; ++x) {
            labels.set(x, y, detail::read_sample(bytes, offset, header.bytes_per_sample));
            offset += header.bytes_per_sample;
        }
    }
    return labels;
}

/// Encodes a mask as 8-bit P5 with foreground = 255.
inline Bytes write_pgm(const raster::BinaryGrid& grid) {
    const std::string header = "P5\n" + std::to_string(grid.width()) + " " +
                               std::to_string(grid.height()) + "\n255\n";
    Bytes bytes(header.begin(), header.end());
    bytes.reserve(bytes.size() + static_cast<std::size_t>(grid.width()) * grid.height());
    for (int y = 0; y < grid.height(); ++y) {
        for (int x = 0; x < grid.width(); ++x) {
            bytes.push_back(grid.at(x, y) ? 255 : 0);
        }
    }
    return bytes;
}

/// Encodes a label map as 16-bit P5 (big-endian samples, maxval 65535).
inline Bytes write_pgm(const raster::LabelMap& labels) {
    for (int y = 0; y < labels.height(); ++y) {
        for (int x = 0; x < labels.width(); ++x) {
            const int v = labels.at(x, y);
            if (v < 0 || v > 65535) {
                throw ValidationError("label " + std::to_string(v) +
                                      " does not fit a 16-bit PGM sample");
            }
        }
    }
    const std::string header = "P5\n" + std::to_string(labels.width()) + " " +
                               std::to_string(labels.height()) + "\n65535\n";
    Bytes bytes(header.begin(), header.end());
    bytes.reserve(bytes.size() + 2 * static_cast<std::size_t>(labels.width()) * labels.height());
    for (int y = 0; y < labels.height(); ++y) {
        for (int x = 0; x < labels.width(); ++x) {
            const int v = labels.at(x, y);
            bytes.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
            bytes.push_back(static_cast<std::uint8_t>(v & 0xff));
        }
    }
    return bytes;
}

// ============================================================================
// sf32
// ============================================================================

inline raster::ScalarField read_sf32(const Bytes& bytes) {
    static constexpr char kMagic[4] = {'S', 'F', 'L', 'D'};
    for (std::size_t i = 0; i < 4; ++i) {
        if (i >= bytes.size() || bytes[i] != static_cast<std::uint8_t>(kMagic[i])) {
            throw FormatError("expected sf32 magic 'SFLD'", i);
        }
    }
    if (bytes.size() < 12) {
        throw FormatError("truncated sf32 header", bytes.size());
    }
    const std::uint32_t width = detail::read_u32_le(bytes, 4);
    const std::uint32_t height = detail::read_u32_le(bytes, 8);
    if (width < 1 || width > detail::kMaxDimension) {
        throw FormatError("width out of range", 4);
    }
    if (height < 1 || height > detail::kMaxDimension) {
        throw FormatError("height out of range", 8);
    }
    const std::uint64_t count = static_cast<std::uint64_t>(width) * height;
    if (count > detail::kMaxCells) {
        throw FormatError("dimension overflow: too many cells", 4);
    }
    detail::check_payload_size(bytes, 12, count * 4);

    raster::ScalarField field(static_cast<int>(width), static_cast<int>(height));
    std::size_t offset = 12;
    for (int y = 0; y < field.height(); ++y) {
        for (int x = 0; x < field.width(); ++x) {
            const float value = std::bit_cast<float>(detail::read_u32_le(bytes, offset));
            if (!std::isfinite(value)) {
                throw FormatError("non-finite cell value", offset);
            }
            field.set(x, y, value);
            offset += 4;
        }
    }
    return field;
}

inline Bytes write_sf32(const raster::ScalarField& field) {
    Bytes bytes = {'S', 'F', 'L', 'D'};
    detail::append_u32_le(bytes, static_cast<std::uint32_t>(field.width()));
    detail::append_u32_le(bytes, static_cast<std::uint32_t>(field.height()));
    bytes.reserve(bytes.size() + 4 * static_cast<std::size_t>(field.width()) * field.height());
    for (int y = 0; y < field.height(); ++y) {
        for (int x = 0; x < field.width(); ++x) {
            const double value = field.at(x, y);
            if (!std::isfinite(value)) {
                throw ValidationError("cannot encode non-finite cell value");
            }
            detail::append_u32_le(bytes, std::bit_cast<std::uint32_t>(static_cast<float>(value)));
        }
    }
    return bytes;
}

// ============================================================================
// File helpers
// ============================================================================

inline Bytes load_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open file: " + path, 0);
    }
    Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw FormatError("read failure: " + path, bytes.size());
    }
    return bytes;
}

inline void save_bytes(const std::string& path, const Bytes& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw FormatError("cannot open file for writing: " + path, 0);
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw FormatError("write failure: " + path, 0);
    }
}

} // namespace codec
} // namespace nucseg
