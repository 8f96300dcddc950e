// Copyright (c) 2026 @squid consultancy group (scg)
// All rights reserved.
// licensed under the apache license 2.0.

/**
 * @file raster.hpp
 * @brief Core 2D grid containers and connected-component labeling
 *
 * Three row-major grid types back every other module: BinaryGrid (masks),
 * LabelMap (instance ids, 0 = background) and ScalarField (real-valued maps).
 * All operations here are pure functions over const inputs and return new
 * values; grids are plain value types and safe to share across threads.
 */

#pragma once

#include <algorithm>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "nucseg/errors.hpp"

namespace nucseg {
namespace raster {

namespace detail {

inline void check_dims(int width, int height) {
    if (width < 1 || height < 1) {
        throw ValidationError("grid dimensions must be at least 1x1, got " +
                              std::to_string(width) + "x" + std::to_string(height));
    }
}

} // namespace detail

// ============================================================================
// Grid types
// ============================================================================

/// Boolean foreground/background mask.
class BinaryGrid {
public:
    BinaryGrid(int width, int height, bool fill = false)
        : width_(width), height_(height) {
        detail::check_dims(width, height);
        cells_.assign(static_cast<std::size_t>(width) * height, fill ? 1 : 0);
    }

    int width() const { return width_; }
    int height() const { return height_; }

    bool at(int x, int y) const { return cells_[index(x, y)] != 0; }
    void set(int x, int y, bool value) { cells_[index(x, y)] = value ? 1 : 0; }

    bool in_bounds(int x, int y) const {
        return x >= 0 && x < width_ && y >= 0 && y < height_;
    }

    /// Off-grid coordinates read as background.
    bool at_or_background(int x, int y) const {
        return in_bounds(x, y) && at(x, y);
    }

    std::size_t foreground_count() const {
        return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), 1));
    }

    bool operator==(const BinaryGrid& other) const {
        return width_ == other.width_ && height_ == other.height_ && cells_ == other.cells_;
    }

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * width_ + x;
    }

    int width_;
    int height_;
    std::vector<std::uint8_t> cells_;
};

/// Non-negative instance identifiers; 0 is background.
class LabelMap {
public:
    LabelMap(int width, int height)
        : width_(width), height_(height) {
        detail::check_dims(width, height);
        cells_.assign(static_cast<std::size_t>(width) * height, 0);
    }

    int width() const { return width_; }
    int height() const { return height_; }

    int at(int x, int y) const { return cells_[index(x, y)]; }
    void set(int x, int y, int label) { cells_[index(x, y)] = label; }

    bool in_bounds(int x, int y) const {
        return x >= 0 && x < width_ && y >= 0 && y < height_;
    }

    int max_label() const {
        int m = 0;
        for (int v : cells_) m = std::max(m, v);
        return m;
    }

    bool operator==(const LabelMap& other) const {
        return width_ == other.width_ && height_ == other.height_ && cells_ == other.cells_;
    }

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * width_ + x;
    }

    int width_;
    int height_;
    std::vector<int> cells_;
};

/// Real-valued map (probabilities, distances, gradients, energies).
class ScalarField {
public:
    ScalarField(int width, int height, double fill = 0.0)
        : width_(width), height_(height) {
        detail::check_dims(width, height);
        cells_.assign(static_cast<std::size_t>(width) * height, fill);
    }

    int width() const { return width_; }
    int height() const { return height_; }

    double at(int x, int y) const { return cells_[index(x, y)]; }
    void set(int x, int y, double value) { cells_[index(x, y)] = value; }

    bool in_bounds(int x, int y) const {
        return x >= 0 && x < width_ && y >= 0 && y < height_;
    }

    /// Reads with coordinates clamped to the grid (edge replication).
    double at_clamped(int x, int y) const {
        x = std::clamp(x, 0, width_ - 1);
        y = std::clamp(y, 0, height_ - 1);
        return at(x, y);
    }

    bool operator==(const ScalarField& other) const {
        return width_ == other.width_ && height_ == other.height_ && cells_ == other.cells_;
    }

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * width_ + x;
    }

    int width_;
    int height_;
    std::vector<double> cells_;
};

// ============================================================================
// Operations
// ============================================================================

enum class Connectivity { four, eight };

/**
 * @brief Labels maximal connected foreground components.
 *
 * Labels are assigned 1..K in first-encounter order of a row-major scan,
 * so the result is fully deterministic.
 */
inline LabelMap connected_components(const BinaryGrid& mask, Connectivity connectivity) {
    LabelMap labels(mask.width(), mask.height());
    const int num_offsets = connectivity == Connectivity::eight ? 8 : 4;
    static constexpr int kDx[8] = {0, -1, 1, 0, -1, 1, -1, 1};
    static constexpr int kDy[8] = {-1, 0, 0, 1, -1, -1, 1, 1};

    int next_label = 0;
    std::vector<std::pair<int, int>> stack;
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (!mask.at(x, y) || labels.at(x, y) != 0) continue;
            ++next_label;
            labels.set(x, y, next_label);
            stack.push_back({x, y});
            while (!stack.empty()) {
                auto [cx, cy] = stack.back();
                stack.pop_back();
                for (int d = 0; d < num_offsets; ++d) {
                    const int nx = cx + kDx[d];
                    const int ny = cy + kDy[d];
                    if (!mask.in_bounds(nx, ny)) continue;
                    if (!mask.at(nx, ny) || labels.at(nx, ny) != 0) continue;
                    labels.set(nx, ny, next_label);
                    stack.push_back({nx, ny});
                }
            }
        }
    }
    return labels;
}

/**
 * @brief Remaps nonzero labels onto {1..K}, preserving first-encounter order.
 *
 * Idempotent; the pixel partition is unchanged.
 */
inline LabelMap relabel_compact(const LabelMap& labels) {
    LabelMap out(labels.width(), labels.height());
    std::unordered_map<int, int> remap;
    int next_label = 0;
    for (int y = 0; y < labels.height(); ++y) {
        for (int x = 0; x < labels.width(); ++x) {
            const int v = labels.at(x, y);
            if (v == 0) continue;
            auto it = remap.find(v);
            if (it == remap.end()) {
                it = remap.emplace(v, ++next_label).first;
            }
            out.set(x, y, it->second);
        }
    }
    return out;
}

/**
 * @brief Mask of the pixels carrying one instance id.
 *
 * An id absent from the map yields an all-background grid; metric loops can
 * iterate label ranges uniformly.
 */
inline BinaryGrid extract_binary(const LabelMap& labels, int id) {
    if (id <= 0) {
        throw ValidationError("extract_binary requires a positive instance id, got " +
                              std::to_string(id));
    }
    BinaryGrid out(labels.width(), labels.height());
    for (int y = 0; y < labels.height(); ++y) {
        for (int x = 0; x < labels.width(); ++x) {
            if (labels.at(x, y) == id) out.set(x, y, true);
        }
    }
    return out;
}

/// Foreground = cells strictly above the threshold.
inline BinaryGrid threshold(const ScalarField& field, double value) {
    BinaryGrid out(field.width(), field.height());
    for (int y = 0; y < field.height(); ++y) {
        for (int x = 0; x < field.width(); ++x) {
            if (field.at(x, y) > value) out.set(x, y, true);
        }
    }
    return out;
}

/// Any nonzero label becomes foreground.
inline BinaryGrid foreground_of(const LabelMap& labels) {
    BinaryGrid out(labels.width(), labels.height());
    for (int y = 0; y < labels.height(); ++y) {
        for (int x = 0; x < labels.width(); ++x) {
            if (labels.at(x, y) != 0) out.set(x, y, true);
        }
    }
    return out;
}

} // namespace raster
} // namespace nucseg
