// Copyright (c) 2026 @squid consultancy group (scg)
// All rights reserved.
// licensed under the apache license 2.0.

/**
 * @file hover.hpp
 * @brief Distance-map post-processing: Sobel edges, markers, watershed
 *
 * The pipeline splits touching instances from a probability map plus
 * horizontal/vertical distance maps. Sobel responses of the distance maps
 * concentrate on instance boundaries, including the internal boundary
 * between touching instances; removing high-energy pixels from the
 * thresholded probability map severs it into per-instance markers, and a
 * marker-controlled priority-flood watershed grows the markers back over
 * the foreground.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <tuple>
#include <vector>

#include "nucseg/errors.hpp"
#include "nucseg/raster.hpp"

namespace nucseg {
namespace hover {

// ============================================================================
// Domain types
// ============================================================================

/// Per-instance-normalized distances of nuclear pixels to their instance's
/// center of mass; background is exactly 0 in both fields.
struct HoVerMaps {
    raster::ScalarField horizontal;
    raster::ScalarField vertical;
};

struct PostprocessConfig {
    double prob_threshold = 0.5;
    double edge_threshold = 0.4;   // tau: marker pixels need energy strictly below
    int min_marker_size = 10;      // components smaller than this are dropped
};

namespace detail {

inline void check_same_dims(int wa, int ha, int wb, int hb, const char* what) {
    if (wa != wb || ha != hb) {
        throw ValidationError(std::string(what) + ": dimension mismatch, " +
                              std::to_string(wa) + "x" + std::to_string(ha) + " vs " +
                              std::to_string(wb) + "x" + std::to_string(hb));
    }
}

inline void check_config(const PostprocessConfig& cfg) {
    if (!(cfg.prob_threshold > 0.0 && cfg.prob_threshold < 1.0)) {
        throw ValidationError("prob_threshold must lie in (0,1)");
    }
    if (!(cfg.edge_threshold > 0.0 && cfg.edge_threshold < 1.0)) {
        throw ValidationError("edge_threshold must lie in (0,1)");
    }
    if (cfg.min_marker_size < 0) {
        throw ValidationError("min_marker_size must be non-negative");
    }
}

/// Min-max normalization to [0,1]; an all-equal field maps to all zeros.
inline raster::ScalarField normalize_unit(const raster::ScalarField& field) {
    double lo = field.at(0, 0);
    double hi = lo;
    for (int y = 0; y < field.height(); ++y) {
        for (int x = 0; x < field.width(); ++x) {
            lo = std::min(lo, field.at(x, y));
            hi = std::max(hi, field.at(x, y));
        }
    }
    raster::ScalarField out(field.width(), field.height());
    if (hi > lo) {
        const double scale = 1.0 / (hi - lo);
        for (int y = 0; y < field.height(); ++y) {
            for (int x = 0; x < field.width(); ++x) {
                out.set(x, y, (field.at(x, y) - lo) * scale);
            }
        }
    }
    return out;
}

} // namespace detail

// ============================================================================
// Operations
// ============================================================================

/**
 * @brief Normalized horizontal/vertical distance maps from an instance map.
 *
 * Within each instance, horizontal(p) = (x_p - mean_x) / max_q |x_q - mean_x|
 * (0 when the instance is one pixel wide on that axis); vertical analogous.
 */
inline HoVerMaps hover_from_labels(const raster::LabelMap& labels) {
    const int count = labels.max_label();
    struct Accum {
        long long n = 0;
        long long sum_x = 0;
        long long sum_y = 0;
        double max_dx = 0.0;
        double max_dy = 0.0;
    };
    std::vector<Accum> acc(static_cast<std::size_t>(count) + 1);
    for (int y = 0; y < labels.height(); ++y) {
        for (int x = 0; x < labels.width(); ++x) {
            const int v = labels.at(x, y);
            if (v == 0) continue;
            acc[v].n += 1;
            acc[v].sum_x += x;
            acc[v].sum_y += y;
        }
    }
    for (int y = 0; y < labels.height(); ++y) {
        for (int x = 0; x < labels.width(); ++x) {
            const int v = labels.at(x, y);
            if (v == 0) continue;
            const double cx = static_cast<double>(acc[v].sum_x) / acc[v].n;
            const double cy = static_cast<double>(acc[v].sum_y) / acc[v].n;
            acc[v].max_dx = std::max(acc[v].max_dx, std::abs(x - cx));
            acc[v].max_dy = std::max(acc[v].max_dy, std::abs(y - cy));
        }
    }
    HoVerMaps maps{raster::ScalarField(labels.width(), labels.height()),
                   raster::ScalarField(labels.width(), labels.height())};
    for (int y = 0; y < labels.height(); ++y) {
        for (int x = 0; x < labels.width(); ++x) {
            const int v = labels.at(x, y);
            if (v == 0) continue;
            const double cx = static_cast<double>(acc[v].sum_x) / acc[v].n;
            const double cy = static_cast<double>(acc[v].sum_y) / acc[v].n;
            if (acc[v].max_dx > 0.0) maps.horizontal.set(x, y, (x - cx) / acc[v].max_dx);
            if (acc[v].max_dy > 0.0) maps.vertical.set(x, y, (y - cy) / acc[v].max_dy);
        }
    }
    return maps;
}

enum class SobelAxis { x, y };

/**
 * @brief Sobel correlation with edge-replicated borders.
 *
 * Kx = [[-1,0,1],[-2,0,2],[-1,0,1]]; Ky is its transpose.
 */
inline raster::ScalarField sobel(const raster::ScalarField& field, SobelAxis axis) {
    raster::ScalarField out(field.width(), field.height());
    for (int y = 0; y < field.height(); ++y) {
        for (int x = 0; x < field.width(); ++x) {
            double sum = 0.0;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const int weight =
                        axis == SobelAxis::x
                            ? dx * (dy == 0 ? 2 : 1)
                            : dy * (dx == 0 ? 2 : 1);
                    if (weight == 0) continue;
                    sum += weight * field.at_clamped(x + dx, y + dy);
                }
            }
            out.set(x, y, sum);
        }
    }
    return out;
}

/**
 * @brief Boundary-energy field in [0,1] from hover maps.
 *
 * Pixelwise max of the unit-normalized |Sobel_x(horizontal)| and
 * |Sobel_y(vertical)| responses.
 */
inline raster::ScalarField edge_energy(const HoVerMaps& maps) {
    detail::check_same_dims(maps.horizontal.width(), maps.horizontal.height(),
                            maps.vertical.width(), maps.vertical.height(), "edge_energy");
    raster::ScalarField sx = sobel(maps.horizontal, SobelAxis::x);
    raster::ScalarField sy = sobel(maps.vertical, SobelAxis::y);
    for (int y = 0; y < sx.height(); ++y) {
        for (int x = 0; x < sx.width(); ++x) {
            sx.set(x, y, std::abs(sx.at(x, y)));
            sy.set(x, y, std::abs(sy.at(x, y)));
        }
    }
    const raster::ScalarField nx = detail::normalize_unit(sx);
    const raster::ScalarField ny = detail::normalize_unit(sy);
    raster::ScalarField out(nx.width(), nx.height());
    for (int y = 0; y < out.height(); ++y) {
        for (int x = 0; x < out.width(); ++x) {
            out.set(x, y, std::max(nx.at(x, y), ny.at(x, y)));
        }
    }
    return out;
}

/**
 * @brief Watershed markers: probable-foreground pixels below the edge threshold.
 *
 * Connected components (8-connectivity) of the marker mask smaller than
 * min_marker_size are removed; labels are compacted.
 */
inline raster::LabelMap extract_markers(const raster::ScalarField& prob,
                                        const raster::ScalarField& energy,
                                        const PostprocessConfig& cfg = {}) {
    detail::check_same_dims(prob.width(), prob.height(), energy.width(), energy.height(),
                            "extract_markers");
    detail::check_config(cfg);
    raster::BinaryGrid marker_mask(prob.width(), prob.height());
    for (int y = 0; y < prob.height(); ++y) {
        for (int x = 0; x < prob.width(); ++x) {
            marker_mask.set(x, y, prob.at(x, y) > cfg.prob_threshold &&
                                      energy.at(x, y) < cfg.edge_threshold);
        }
    }
    const raster::LabelMap components =
        raster::connected_components(marker_mask, raster::Connectivity::eight);
    const int count = components.max_label();
    std::vector<long long> sizes(static_cast<std::size_t>(count) + 1, 0);
    for (int y = 0; y < components.height(); ++y) {
        for (int x = 0; x < components.width(); ++x) {
            ++sizes[components.at(x, y)];
        }
    }
    raster::LabelMap filtered(components.width(), components.height());
    for (int y = 0; y < components.height(); ++y) {
        for (int x = 0; x < components.width(); ++x) {
            const int v = components.at(x, y);
            if (v > 0 && sizes[v] >= cfg.min_marker_size) filtered.set(x, y, v);
        }
    }
    return raster::relabel_compact(filtered);
}

/**
 * @brief Marker-controlled priority-flood watershed over the foreground.
 *
 * Pixels leave a min-heap ordered by (energy, insertion sequence number), so
 * ties resolve deterministically; each popped pixel labels its unlabeled
 * 4-adjacent foreground neighbors. Foreground 4-components containing no
 * marker each become one appended instance. Background stays 0.
 */
inline raster::LabelMap watershed(const raster::ScalarField& energy,
                                  const raster::LabelMap& markers,
                                  const raster::BinaryGrid& fg) {
    detail::check_same_dims(energy.width(), energy.height(), markers.width(),
                            markers.height(), "watershed");
    detail::check_same_dims(energy.width(), energy.height(), fg.width(), fg.height(),
                            "watershed");
    for (int y = 0; y < markers.height(); ++y) {
        for (int x = 0; x < markers.width(); ++x) {
            if (markers.at(x, y) > 0 && !fg.at(x, y)) {
                throw ValidationError("marker at (" + std::to_string(x) + "," +
                                      std::to_string(y) + ") lies outside the foreground");
            }
        }
    }

    raster::LabelMap labels(markers.width(), markers.height());
    int next_label = markers.max_label();

    // markerless 4-components become whole instances up front
    const raster::LabelMap components =
        raster::connected_components(fg, raster::Connectivity::four);
    const int comp_count = components.max_label();
    std::vector<bool> has_marker(static_cast<std::size_t>(comp_count) + 1, false);
    for (int y = 0; y < fg.height(); ++y) {
        for (int x = 0; x < fg.width(); ++x) {
            if (markers.at(x, y) > 0) has_marker[components.at(x, y)] = true;
        }
    }
    std::vector<int> orphan_label(static_cast<std::size_t>(comp_count) + 1, 0);
    for (int c = 1; c <= comp_count; ++c) {
        if (!has_marker[c]) orphan_label[c] = ++next_label;   // row-major component order
    }
    for (int y = 0; y < fg.height(); ++y) {
        for (int x = 0; x < fg.width(); ++x) {
            const int c = components.at(x, y);
            if (c > 0 && orphan_label[c] > 0) labels.set(x, y, orphan_label[c]);
            if (markers.at(x, y) > 0) labels.set(x, y, markers.at(x, y));
        }
    }

    struct Node {
        double energy;
        std::uint64_t seq;
        int x;
        int y;
    };
    auto later = [](const Node& a, const Node& b) {
        return a.energy != b.energy ? a.energy > b.energy : a.seq > b.seq;
    };
    std::priority_queue<Node, std::vector<Node>, decltype(later)> queue(later);
    std::uint64_t seq = 0;
    for (int y = 0; y < markers.height(); ++y) {
        for (int x = 0; x < markers.width(); ++x) {
            if (markers.at(x, y) > 0) queue.push({energy.at(x, y), seq++, x, y});
        }
    }

    static constexpr int kDx[4] = {0, -1, 1, 0};
    static constexpr int kDy[4] = {-1, 0, 0, 1};
    while (!queue.empty()) {
        const Node node = queue.top();
        queue.pop();
        const int label = labels.at(node.x, node.y);
        for (int d = 0; d < 4; ++d) {
            const int nx = node.x + kDx[d];
            const int ny = node.y + kDy[d];
            if (!fg.in_bounds(nx, ny) || !fg.at(nx, ny)) continue;
            if (labels.at(nx, ny) != 0) continue;
            labels.set(nx, ny, label);
            queue.push({energy.at(nx, ny), seq++, nx, ny});
        }
    }
    return labels;
}

/**
 * @brief Full pipeline: edge energy, markers, watershed; compacted output.
 */
inline raster::LabelMap postprocess(const raster::ScalarField& prob, const HoVerMaps& maps,
                                    const PostprocessConfig& cfg = {}) {
    detail::check_same_dims(prob.width(), prob.height(), maps.horizontal.width(),
                            maps.horizontal.height(), "postprocess");
    const raster::ScalarField energy = edge_energy(maps);
    const raster::LabelMap markers = extract_markers(prob, energy, cfg);
    const raster::BinaryGrid fg = raster::threshold(prob, cfg.prob_threshold);
    return raster::relabel_compact(watershed(energy, markers, fg));
}

} // namespace hover
} // namespace nucseg
