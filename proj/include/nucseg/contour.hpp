// Copyright (c) 2026 @squid consultancy group (scg)
// All rights reserved.
// licensed under the apache license 2.0.

/**
 * @file contour.hpp
 * @brief Outer-contour tracing and discrete bending energy
 *
 * Contours are closed, ordered, 8-connected cycles of pixel coordinates,
 * one per foreground component, traced clockwise in image coordinates
 * (y grows downward) by Moore-neighbor walking with Jacob's stopping
 * criterion. The start pixel is the component's row-major-first pixel;
 * holes are not traced.
 *
 * For three consecutive contour pixels the discrete curvature is
 *
 *     kappa = 2*|v1 x v2| / (|v1|*|v2| + v1.v2)
 *
 * with v1 the incoming and v2 the outgoing edge vector, and the per-point
 * bending energy is kappa^2 / (|v1| + |v2|). On the 8-neighborhood this
 * takes exactly five regular values:
 *
 *     0          straight continuation
 *     0.284271   45-degree step between an axis and a diagonal edge
 *     1.414214   right angle between two diagonal edges
 *     2.0        right angle between two axis edges
 *     9.656854   135-degree turn between an axis and a diagonal edge
 *
 * Antiparallel edges (a 180-degree reversal at a one-pixel spur) zero the
 * curvature denominator; such points are assigned the configured cap.
 * A point with more than two contour neighbors (distinct instance contours
 * sharing segments) is scored by point_bending_energy, the minimum energy
 * over its neighbor pairs.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <unordered_map>
#include <vector>

#include "nucseg/errors.hpp"
#include "nucseg/raster.hpp"

namespace nucseg {
namespace contour {

// ============================================================================
// Domain types
// ============================================================================

struct PixelPoint {
    int x = 0;
    int y = 0;

    friend bool operator==(PixelPoint a, PixelPoint b) { return a.x == b.x && a.y == b.y; }
    friend bool operator!=(PixelPoint a, PixelPoint b) { return !(a == b); }
    /// Row-major order: by row, then by column.
    friend bool operator<(PixelPoint a, PixelPoint b) {
        return a.y != b.y ? a.y < b.y : a.x < b.x;
    }
};

struct EdgeVector {
    int dx = 0;
    int dy = 0;
    double length = 0.0;
};

inline EdgeVector edge_vector(PixelPoint from, PixelPoint to) {
    EdgeVector v;
    v.dx = to.x - from.x;
    v.dy = to.y - from.y;
    v.length = std::sqrt(static_cast<double>(v.dx) * v.dx + static_cast<double>(v.dy) * v.dy);
    return v;
}

struct BendConfig {
    /// Bending energy assigned at singular (180-degree reversal) points.
    /// Must stay strictly above the largest regular pattern value 9.657.
    double be_cap = 24.0;
    /// Curvature-denominator threshold that detects the singular case.
    double epsilon = 1e-9;
};

enum class ContourSource { outer };

struct Contour {
    std::vector<PixelPoint> points;          // cyclic; consecutive points 8-adjacent
    ContourSource source = ContourSource::outer;
    std::vector<double> per_point_be;        // parallel to points once annotated
};

namespace detail {

inline void check_config(const BendConfig& cfg) {
    if (!(cfg.be_cap > 9.66)) {
        throw ValidationError("be_cap must exceed 9.66, the largest regular pattern value");
    }
    if (!(cfg.epsilon > 0.0)) {
        throw ValidationError("epsilon must be positive");
    }
}

struct BendTerms {
    double len1 = 0.0;
    double len2 = 0.0;
    double denom = 0.0;   // |v1|*|v2| + v1.v2; zero exactly when antiparallel
    double cross = 0.0;
    bool singular = false;
};

inline BendTerms bend_terms(PixelPoint prev, PixelPoint cur, PixelPoint next,
                            const BendConfig& cfg) {
    check_config(cfg);
    if (prev == cur || cur == next) {
        throw ValidationError("zero-length edge vector in curvature computation");
    }
    const EdgeVector v1 = edge_vector(prev, cur);
    const EdgeVector v2 = edge_vector(cur, next);
    BendTerms t;
    t.len1 = v1.length;
    t.len2 = v2.length;
    t.cross = std::abs(static_cast<double>(v1.dx) * v2.dy - static_cast<double>(v1.dy) * v2.dx);
    const double dot = static_cast<double>(v1.dx) * v2.dx + static_cast<double>(v1.dy) * v2.dy;
    t.denom = t.len1 * t.len2 + dot;
    t.singular = t.denom < cfg.epsilon;
    return t;
}

} // namespace detail

// ============================================================================
// Curvature and bending energy
// ============================================================================

/**
 * @brief Discrete curvature at `cur` given its contour predecessor and successor.
 *
 * At singular (antiparallel) points returns the sentinel value whose squared
 * form reproduces the configured cap, sqrt(be_cap * (|v1| + |v2|)).
 * General integer offsets are accepted, not just 8-neighbor steps.
 */
inline double curvature(PixelPoint prev, PixelPoint cur, PixelPoint next,
                        const BendConfig& cfg = {}) {
    const auto t = detail::bend_terms(prev, cur, next, cfg);
    if (t.singular) {
        return std::sqrt(cfg.be_cap * (t.len1 + t.len2));
    }
    return 2.0 * t.cross / t.denom;
}

/**
 * @brief Per-point bending energy kappa^2 / (|v1| + |v2|); be_cap when singular.
 */
inline double bending_energy(PixelPoint prev, PixelPoint cur, PixelPoint next,
                             const BendConfig& cfg = {}) {
    const auto t = detail::bend_terms(prev, cur, next, cfg);
    if (t.singular) {
        return cfg.be_cap;
    }
    const double kappa = 2.0 * t.cross / t.denom;
    return kappa * kappa / (t.len1 + t.len2);
}

/**
 * @brief Minimum bending energy over all unordered pairs of contour neighbors.
 *
 * Applies where a contour point has more than two neighbors (shared contour
 * segments); the smallest loss over the possible local shapes is used.
 */
inline double point_bending_energy(const std::set<PixelPoint>& neighbors, PixelPoint cur,
                                   const BendConfig& cfg = {}) {
    if (neighbors.size() < 2) {
        throw ValidationError("point_bending_energy requires at least two neighbors");
    }
    double best = std::numeric_limits<double>::infinity();
    for (auto a = neighbors.begin(); a != neighbors.end(); ++a) {
        auto b = a;
        for (++b; b != neighbors.end(); ++b) {
            best = std::min(best, bending_energy(*a, cur, *b, cfg));
        }
    }
    return best;
}

// ============================================================================
// Moore-neighbor tracing
// ============================================================================

namespace detail {

// Moore neighborhood in clockwise order (image coordinates, y down),
// starting west: W NW N NE E SE S SW.
inline constexpr std::array<PixelPoint, 8> kClockwise = {{
    {-1, 0}, {-1, -1}, {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1},
}};

inline int direction_of(PixelPoint from, PixelPoint to) {
    for (int d = 0; d < 8; ++d) {
        if (from.x + kClockwise[d].x == to.x && from.y + kClockwise[d].y == to.y) return d;
    }
    return -1;
}

struct TraceState {
    PixelPoint cur;
    int back = 0;   // direction index from cur to the background backtrack pixel

    friend bool operator==(const TraceState& a, const TraceState& b) {
        return a.cur == b.cur && a.back == b.back;
    }
};

inline std::uint64_t state_key(const TraceState& s, int width) {
    return (static_cast<std::uint64_t>(s.cur.y) * width + s.cur.x) * 8u + s.back;
}

// One Moore step: scan the neighborhood clockwise starting just past the
// backtrack direction; the first foreground pixel becomes the new current
// pixel and the neighbor examined just before it becomes the new backtrack.
// Returns false when the pixel has no foreground neighbor.
inline bool moore_step(const raster::BinaryGrid& mask, TraceState& state) {
    for (int k = 1; k <= 8; ++k) {
        const int d = (state.back + k) & 7;
        const PixelPoint n{state.cur.x + kClockwise[d].x, state.cur.y + kClockwise[d].y};
        if (!mask.at_or_background(n.x, n.y)) continue;
        const int prev_d = (state.back + k - 1) & 7;
        const PixelPoint backtrack{state.cur.x + kClockwise[prev_d].x,
                                   state.cur.y + kClockwise[prev_d].y};
        state.back = direction_of(n, backtrack);
        state.cur = n;
        return true;
    }
    return false;
}

// Walks from the component's row-major-first pixel until the tracer state
// recurs (Jacob's criterion on the (pixel, entry direction) state), then
// keeps the cyclic part rotated to start at the start pixel.
inline Contour trace_component(const raster::BinaryGrid& mask, PixelPoint start) {
    Contour contour;
    TraceState state{start, 0};   // backtrack west: background for a row-major-first pixel

    std::vector<TraceState> orbit;
    std::unordered_map<std::uint64_t, std::size_t> seen;
    std::size_t cycle_begin = 0;
    while (true) {
        const auto key = state_key(state, mask.width());
        auto it = seen.find(key);
        if (it != seen.end()) {
            cycle_begin = it->second;
            break;
        }
        seen.emplace(key, orbit.size());
        orbit.push_back(state);
        if (!moore_step(mask, state)) {
            // isolated pixel: degenerate one-point contour
            contour.points.push_back(start);
            return contour;
        }
    }

    // rotate the cycle so the contour starts at the start pixel
    std::size_t first = cycle_begin;
    while (!(orbit[first].cur == start)) ++first;
    for (std::size_t i = first; i < orbit.size(); ++i) contour.points.push_back(orbit[i].cur);
    for (std::size_t i = cycle_begin; i < first; ++i) contour.points.push_back(orbit[i].cur);
    return contour;
}

} // namespace detail

/**
 * @brief Traces the outer contour of every foreground 8-connected component.
 *
 * Contours are ordered by their component's first-encounter label order and
 * each begins at the component's row-major-first pixel. Fully deterministic.
 */
inline std::vector<Contour> trace_outer_contours(const raster::BinaryGrid& mask) {
    const raster::LabelMap components =
        raster::connected_components(mask, raster::Connectivity::eight);
    const int count = components.max_label();
    std::vector<PixelPoint> starts(static_cast<std::size_t>(count) + 1, PixelPoint{-1, -1});
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            const int label = components.at(x, y);
            if (label > 0 && starts[label].x < 0) starts[label] = PixelPoint{x, y};
        }
    }
    std::vector<Contour> contours;
    contours.reserve(count);
    for (int label = 1; label <= count; ++label) {
        contours.push_back(detail::trace_component(mask, starts[label]));
    }
    return contours;
}

// ============================================================================
// Bending over traced contours
// ============================================================================

/**
 * @brief Fills per_point_be for one traced contour.
 *
 * Contours shorter than three points have no defined curvature; their
 * entries are zero. Every traced position has a well-defined (prev, next)
 * pair and is scored from it; a pixel the cycle traverses twice (a spur or
 * a one-pixel pinch) contributes one term per visit. The min-over-pairs
 * rule of point_bending_energy applies where a point genuinely has more
 * than two neighbors (distinct instance contours sharing segments), a
 * situation a single traced cycle never produces.
 */
inline void annotate_bending(Contour& c, const BendConfig& cfg = {}) {
    detail::check_config(cfg);
    const std::size_t m = c.points.size();
    c.per_point_be.assign(m, 0.0);
    if (m < 3) return;
    for (std::size_t i = 0; i < m; ++i) {
        const PixelPoint prev = c.points[(i + m - 1) % m];
        const PixelPoint next = c.points[(i + 1) % m];
        c.per_point_be[i] = bending_energy(prev, c.points[i], next, cfg);
    }
}

/**
 * @brief Image bending loss: mean per-point bending energy over all contours.
 *
 * Contours with fewer than three points are excluded from both the sum and
 * the denominator. Returns 0 when no contour point qualifies (in particular
 * for an all-background mask). Terms are summed in sorted order so the
 * result is bit-stable under any symmetry that permutes them.
 */
inline double bending_loss(const raster::BinaryGrid& mask, const BendConfig& cfg = {}) {
    auto contours = trace_outer_contours(mask);
    std::vector<double> terms;
    for (auto& c : contours) {
        if (c.points.size() < 3) continue;
        annotate_bending(c, cfg);
        terms.insert(terms.end(), c.per_point_be.begin(), c.per_point_be.end());
    }
    if (terms.empty()) return 0.0;
    std::sort(terms.begin(), terms.end());
    double sum = 0.0;
    for (double t : terms) sum += t;
    return sum / static_cast<double>(terms.size());
}

// ============================================================================
// Pattern taxonomy
// ============================================================================

struct Pattern {
    EdgeVector v1;
    EdgeVector v2;
    double be = 0.0;
};

/**
 * @brief All 28 unordered pairs of distinct 8-neighbor offsets with their BE.
 *
 * Each pair {a, b} is read as a local contour shape through the origin with
 * predecessor at offset a and successor at offset b; bending energy does not
 * depend on which of the two is called the predecessor. The finite values
 * fall into five groups: 4 patterns at 0, 8 at 0.284271, 4 at 1.414214,
 * 4 at 2.0 and 8 at 9.656854.
 */
inline std::vector<Pattern> enumerate_patterns(const BendConfig& cfg = {}) {
    std::vector<Pattern> patterns;
    patterns.reserve(28);
    const PixelPoint origin{0, 0};
    for (int i = 0; i < 8; ++i) {
        for (int j = i + 1; j < 8; ++j) {
            const PixelPoint prev{detail::kClockwise[i].x, detail::kClockwise[i].y};
            const PixelPoint next{detail::kClockwise[j].x, detail::kClockwise[j].y};
            Pattern p;
            p.v1 = edge_vector(prev, origin);
            p.v2 = edge_vector(origin, next);
            p.be = bending_energy(prev, origin, next, cfg);
            patterns.push_back(p);
        }
    }
    return patterns;
}

} // namespace contour
} // namespace nucseg
