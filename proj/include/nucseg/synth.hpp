// Copyright (c) 2026 @squid consultancy group (scg)
// All rights reserved.
// licensed under the apache license 2.0.

/**
 * @file synth.hpp
 * @brief Deterministic synthetic nuclei scenes for end-to-end testing
 *
 * Scenes hold rasterized rotated ellipses with ground-truth labels, an
 * indicator probability map and matching hover maps. All randomness comes
 * from splitmix64 seeded by the caller, so a seed pins a scene bit-exactly;
 * the integer random stream itself is portable across implementations.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "nucseg/errors.hpp"
#include "nucseg/hover.hpp"
#include "nucseg/raster.hpp"

namespace nucseg {
namespace synth {

// ============================================================================
// Pseudo-random generator
// ============================================================================

/// splitmix64: fixed algorithm, documented output sequence.
struct SplitMix64 {
    std::uint64_t state = 0;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    /// Standard pseudo-Gaussian deviate via Box-Muller.
    double next_gaussian() {
        const double u1 = 1.0 - next_unit();   // (0, 1]
        const double u2 = next_unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }
};

// ============================================================================
// Domain types
// ============================================================================

struct SceneParams {
    int width = 96;
    int height = 96;
    int count = 4;                      // total instances
    double radius_min = 6.0;            // semi-axis range
    double radius_max = 9.0;
    int overlap_pairs = 0;              // deliberately touching pairs
    std::uint64_t seed = 1;
};

struct Scene {
    raster::LabelMap gt;
    raster::ScalarField prob;
    hover::HoVerMaps hover_maps;
};

/// Shared-area bookkeeping for one generated overlap pair.
struct PairStats {
    long long shared_pixels = 0;
    long long smaller_area = 0;   // the smaller member's original raster size
};

namespace detail {

struct Ellipse {
    double cx, cy, a, b, theta;
};

inline std::vector<std::pair<int, int>> rasterize(const Ellipse& e, int width, int height) {
    std::vector<std::pair<int, int>> pixels;
    const double r = std::max(e.a, e.b);
    const int x0 = std::max(0, static_cast<int>(std::floor(e.cx - r)) - 1);
    const int x1 = std::min(width - 1, static_cast<int>(std::ceil(e.cx + r)) + 1);
    const int y0 = std::max(0, static_cast<int>(std::floor(e.cy - r)) - 1);
    const int y1 = std::min(height - 1, static_cast<int>(std::ceil(e.cy + r)) + 1);
    const double c = std::cos(e.theta);
    const double s = std::sin(e.theta);
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            const double dx = x - e.cx;
            const double dy = y - e.cy;
            const double u = (c * dx + s * dy) / e.a;
            const double v = (-s * dx + c * dy) / e.b;
            if (u * u + v * v <= 1.0) pixels.push_back({x, y});
        }
    }
    return pixels;
}

inline bool is_four_connected(const std::vector<std::pair<int, int>>& pixels, int width,
                              int height) {
    if (pixels.empty()) return false;
    raster::BinaryGrid mask(width, height);
    for (auto [x, y] : pixels) mask.set(x, y, true);
    const auto labels = raster::connected_components(mask, raster::Connectivity::four);
    return labels.max_label() == 1;
}

/// True when every pixel of `pixels` is at Euclidean distance >= 2 from the
/// occupied set, i.e. shares no cell and is not 8-adjacent to one.
inline bool separated_from(const std::vector<std::pair<int, int>>& pixels,
                           const raster::BinaryGrid& occupied) {
    for (auto [x, y] : pixels) {
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                if (occupied.at_or_background(x + dx, y + dy)) return false;
            }
        }
    }
    return true;
}

inline long long overlap_count(const std::vector<std::pair<int, int>>& pixels,
                               const raster::BinaryGrid& other) {
    long long n = 0;
    for (auto [x, y] : pixels) {
        if (other.at(x, y)) ++n;
    }
    return n;
}

} // namespace detail

// ============================================================================
// Operations
// ============================================================================

/**
 * @brief Places `count` rotated ellipses and derives gt, prob and hover maps.
 *
 * Non-overlapping instances keep pairwise pixel distance >= 2. Each overlap
 * pair shares 5-25% of the smaller member's area (the sampler targets the
 * shallow 5-12% band, where the pair's distance-map ridge stays continuous);
 * shared pixels belong to the later-drawn member, so labels partition the
 * foreground. Every placed instance is validated to stay 4-connected after
 * overlap stealing, and placement is rejection-sampled with a 10000-attempt
 * budget. Pass `pair_stats` to receive the shared-area bookkeeping.
 */
inline Scene gen_scene(const SceneParams& params,
                       std::vector<PairStats>* pair_stats = nullptr) {
    if (pair_stats) pair_stats->clear();
    if (params.width < 8 || params.height < 8) {
        throw ValidationError("scene must be at least 8x8");
    }
    if (params.count < 1) {
        throw ValidationError("count must be positive");
    }
    if (params.overlap_pairs < 0 || params.count < 2 * params.overlap_pairs) {
        throw ValidationError("count must be at least twice overlap_pairs");
    }
    if (!(params.radius_min > 0.0) || params.radius_min > params.radius_max) {
        throw ValidationError("radius range must satisfy 0 < min <= max");
    }
    if (params.width - 1 <= 2 * params.radius_max ||
        params.height - 1 <= 2 * params.radius_max) {
        throw ValidationError("image too small for radius_max");
    }

    SplitMix64 rng(params.seed);
    const int max_attempts = 10000;
    int attempts = 0;

    std::vector<std::vector<std::pair<int, int>>> instances;   // draw order = label order
    raster::BinaryGrid occupied(params.width, params.height);

    auto sample_ellipse = [&](double cx, double cy) {
        detail::Ellipse e;
        e.cx = cx;
        e.cy = cy;
        e.a = rng.next_in(params.radius_min, params.radius_max);
        e.b = rng.next_in(params.radius_min, params.radius_max);
        e.theta = rng.next_in(0.0, M_PI);
        return e;
    };
    auto sample_center_x = [&] {
        return rng.next_in(params.radius_max, params.width - 1 - params.radius_max);
    };
    auto sample_center_y = [&] {
        return rng.next_in(params.radius_max, params.height - 1 - params.radius_max);
    };
    auto commit = [&](std::vector<std::pair<int, int>> pixels) {
        for (auto [x, y] : pixels) occupied.set(x, y, true);
        instances.push_back(std::move(pixels));
    };
    auto next_attempt = [&] {
        if (++attempts > max_attempts) {
            throw CapacityError(
                "could not place the requested scene in 10000 attempts; "
                "reduce count or radii, or enlarge the image");
        }
    };

    // touching pairs first, then separated singles
    for (int pair = 0; pair < params.overlap_pairs; ++pair) {
        // anchor: separated from everything placed so far
        std::vector<std::pair<int, int>> anchor_pixels;
        detail::Ellipse anchor{};
        while (true) {
            next_attempt();
            anchor = sample_ellipse(sample_center_x(), sample_center_y());
            anchor_pixels = detail::rasterize(anchor, params.width, params.height);
            if (anchor_pixels.empty()) continue;
            if (!detail::is_four_connected(anchor_pixels, params.width, params.height)) continue;
            if (!detail::separated_from(anchor_pixels, occupied)) continue;
            break;
        }
        raster::BinaryGrid anchor_mask(params.width, params.height);
        for (auto [x, y] : anchor_pixels) anchor_mask.set(x, y, true);

        // partner: overlaps only the anchor, by 5-25% of the smaller area.
        // Sampled size-matched and along a near-axis direction so the shared
        // boundary stays roughly perpendicular to one distance-map gradient;
        // strongly diagonal interfaces leave gaps in the Sobel ridge.
        while (true) {
            next_attempt();
            const int axis = static_cast<int>(rng.next() & 3);
            const double angle = axis * (M_PI / 2.0) + rng.next_in(-0.2, 0.2);
            const double dist = rng.next_in(1.3, 1.85) * std::max(anchor.a, anchor.b);
            detail::Ellipse partner;
            partner.cx = anchor.cx + dist * std::cos(angle);
            partner.cy = anchor.cy + dist * std::sin(angle);
            partner.a = std::clamp(anchor.a * rng.next_in(0.85, 1.2), params.radius_min,
                                   params.radius_max);
            partner.b = std::clamp(anchor.b * rng.next_in(0.85, 1.2), params.radius_min,
                                   params.radius_max);
            // orientation near the pair axis keeps the shared arc perpendicular
            // to a distance-map gradient
            partner.theta = angle + rng.next_in(-0.3, 0.3);
            auto partner_pixels = detail::rasterize(partner, params.width, params.height);
            if (partner_pixels.empty()) continue;
            if (!detail::is_four_connected(partner_pixels, params.width, params.height)) {
                continue;
            }
            bool inside = true;
            for (auto [x, y] : partner_pixels) {
                if (x < 1 || y < 1 || x >= params.width - 1 || y >= params.height - 1) {
                    inside = false;
                    break;
                }
            }
            if (!inside) continue;
            if (!detail::separated_from(partner_pixels, occupied)) continue;   // others only

            const long long shared = detail::overlap_count(partner_pixels, anchor_mask);
            const long long smaller = std::min(
                static_cast<long long>(anchor_pixels.size()),
                static_cast<long long>(partner_pixels.size()));
            if (shared < 1 || smaller < 1) continue;
            const double fraction = static_cast<double>(shared) / smaller;
            if (fraction < 0.05 || fraction > 0.12) continue;

            // the anchor loses the shared pixels; it must survive connected
            std::vector<std::pair<int, int>> anchor_rest;
            raster::BinaryGrid partner_mask(params.width, params.height);
            for (auto [x, y] : partner_pixels) partner_mask.set(x, y, true);
            for (auto [x, y] : anchor_pixels) {
                if (!partner_mask.at(x, y)) anchor_rest.push_back({x, y});
            }
            if (anchor_rest.empty() ||
                !detail::is_four_connected(anchor_rest, params.width, params.height)) {
                continue;
            }
            if (pair_stats) pair_stats->push_back({shared, smaller});
            commit(std::move(anchor_rest));
            commit(std::move(partner_pixels));
            break;
        }
    }

    const int singles = params.count - 2 * params.overlap_pairs;
    for (int i = 0; i < singles; ++i) {
        while (true) {
            next_attempt();
            const detail::Ellipse e = sample_ellipse(sample_center_x(), sample_center_y());
            auto pixels = detail::rasterize(e, params.width, params.height);
            if (pixels.empty()) continue;
            if (!detail::is_four_connected(pixels, params.width, params.height)) continue;
            if (!detail::separated_from(pixels, occupied)) continue;
            commit(std::move(pixels));
            break;
        }
    }

    Scene scene{raster::LabelMap(params.width, params.height),
                raster::ScalarField(params.width, params.height),
                {raster::ScalarField(params.width, params.height),
                 raster::ScalarField(params.width, params.height)}};
    for (std::size_t k = 0; k < instances.size(); ++k) {
        for (auto [x, y] : instances[k]) {
            scene.gt.set(x, y, static_cast<int>(k) + 1);
        }
    }
    for (int y = 0; y < params.height; ++y) {
        for (int x = 0; x < params.width; ++x) {
            scene.prob.set(x, y, scene.gt.at(x, y) != 0 ? 1.0 : 0.0);
        }
    }
    scene.hover_maps = hover::hover_from_labels(scene.gt);
    return scene;
}

/**
 * @brief Adds clamped pseudo-Gaussian noise to prob and hover fields.
 *
 * Ground truth is untouched; sigma 0 returns the scene unchanged. The noise
 * stream is consumed in a fixed field and pixel order, so a (scene, sigma,
 * seed) triple pins the result.
 */
inline Scene perturb(const Scene& scene, double noise_sigma, std::uint64_t seed) {
    if (noise_sigma < 0.0) {
        throw ValidationError("noise_sigma must be non-negative");
    }
    if (noise_sigma == 0.0) return scene;
    SplitMix64 rng(seed);
    Scene out = scene;
    auto add_noise = [&](raster::ScalarField& field, double lo, double hi) {
        for (int y = 0; y < field.height(); ++y) {
            for (int x = 0; x < field.width(); ++x) {
                const double v = field.at(x, y) + noise_sigma * rng.next_gaussian();
                field.set(x, y, std::clamp(v, lo, hi));
            }
        }
    };
    add_noise(out.prob, 0.0, 1.0);
    add_noise(out.hover_maps.horizontal, -1.0, 1.0);
    add_noise(out.hover_maps.vertical, -1.0, 1.0);
    return out;
}

} // namespace synth
} // namespace nucseg
