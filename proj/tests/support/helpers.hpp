// Copyright (c) 2026 @squid consultancy group (scg)
// All rights reserved.
// licensed under the apache license 2.0.

/**
 * @file helpers.hpp
 * @brief Shared fixture builders for the test suites
 */

#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include "nucseg/raster.hpp"
#include "nucseg/synth.hpp"

namespace testsupport {

/// Builds a mask from rows of '.' (background) and '#' (foreground).
inline nucseg::raster::BinaryGrid mask_from(std::initializer_list<std::string> rows) {
    const int height = static_cast<int>(rows.size());
    const int width = static_cast<int>(rows.begin()->size());
    nucseg::raster::BinaryGrid grid(width, height);
    int y = 0;
    for (const auto& row : rows) {
        for (int x = 0; x < width; ++x) grid.set(x, y, row[x] == '#');
        ++y;
    }
    return grid;
}

/// Builds a label map from rows of '.' and digits 1-9.
inline nucseg::raster::LabelMap labels_from(std::initializer_list<std::string> rows) {
    const int height = static_cast<int>(rows.size());
    const int width = static_cast<int>(rows.begin()->size());
    nucseg::raster::LabelMap labels(width, height);
    int y = 0;
    for (const auto& row : rows) {
        for (int x = 0; x < width; ++x) {
            if (row[x] != '.') labels.set(x, y, row[x] - '0');
        }
        ++y;
    }
    return labels;
}

inline nucseg::raster::BinaryGrid filled_rect(int grid_w, int grid_h, int x0, int y0,
                                              int w, int h) {
    nucseg::raster::BinaryGrid grid(grid_w, grid_h);
    for (int y = y0; y < y0 + h; ++y)
        for (int x = x0; x < x0 + w; ++x) grid.set(x, y, true);
    return grid;
}

inline void paint_disk(nucseg::raster::BinaryGrid& grid, double cx, double cy, double r) {
    for (int y = 0; y < grid.height(); ++y)
        for (int x = 0; x < grid.width(); ++x) {
            const double dx = x - cx;
            const double dy = y - cy;
            if (dx * dx + dy * dy <= r * r) grid.set(x, y, true);
        }
}

inline nucseg::raster::BinaryGrid random_mask(nucseg::synth::SplitMix64& rng, int max_side,
                                              double density) {
    const int w = 2 + static_cast<int>(rng.next() % (max_side - 1));
    const int h = 2 + static_cast<int>(rng.next() % (max_side - 1));
    nucseg::raster::BinaryGrid grid(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (rng.next_unit() < density) grid.set(x, y, true);
    return grid;
}

/// Random label map with up to `max_instances` rectangular-ish blobs.
inline nucseg::raster::LabelMap random_label_map(nucseg::synth::SplitMix64& rng, int side,
                                                 int max_instances) {
    nucseg::raster::LabelMap labels(side, side);
    const int count = 1 + static_cast<int>(rng.next() % max_instances);
    for (int k = 1; k <= count; ++k) {
        const int w = 1 + static_cast<int>(rng.next() % (side / 2));
        const int h = 1 + static_cast<int>(rng.next() % (side / 2));
        const int x0 = static_cast<int>(rng.next() % (side - w + 1));
        const int y0 = static_cast<int>(rng.next() % (side - h + 1));
        for (int y = y0; y < y0 + h; ++y)
            for (int x = x0; x < x0 + w; ++x) labels.set(x, y, k);
    }
    return nucseg::raster::relabel_compact(labels);
}

/// The eight raster dihedral symmetries; index 0 is the identity.
inline nucseg::raster::BinaryGrid dihedral(const nucseg::raster::BinaryGrid& m, int which) {
    const int w = m.width(), h = m.height();
    const bool swap = (which == 1 || which == 3 || which == 5 || which == 7);
    nucseg::raster::BinaryGrid out(swap ? h : w, swap ? w : h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (!m.at(x, y)) continue;
            int nx = 0, ny = 0;
            switch (which) {
            case 0: nx = x; ny = y; break;
            case 1: nx = h - 1 - y; ny = x; break;            // rotate 90
            case 2: nx = w - 1 - x; ny = h - 1 - y; break;    // rotate 180
            case 3: nx = y; ny = w - 1 - x; break;            // rotate 270
            case 4: nx = w - 1 - x; ny = y; break;            // flip horizontal
            case 5: nx = y; ny = x; break;                    // transpose
            case 6: nx = x; ny = h - 1 - y; break;            // flip vertical
            case 7: nx = h - 1 - y; ny = w - 1 - x; break;    // anti-transpose
            }
            out.set(nx, ny, true);
        }
    return out;
}

// ----------------------------------------------------------------------------
// Frozen two-disk fixture: equal disks r=4.5 centered (7.5, 8) and (14.55, 8)
// on a 23x16 grid; they share 9.8% of a disk's area and pinch at the circle
// crossings near (11.025, 5.20) and (11.025, 10.80).
// ----------------------------------------------------------------------------

struct DiskPairFixture {
    nucseg::raster::BinaryGrid merged;
    nucseg::raster::BinaryGrid disk1;
    nucseg::raster::BinaryGrid disk2;
    nucseg::raster::BinaryGrid separated;
    double inter_x, inter_y_top, inter_y_bottom;   // true circle intersections
};

inline DiskPairFixture disk_pair_fixture() {
    const double r = 4.5, cx1 = 7.5, cx2 = 14.55, cy = 8.0;
    DiskPairFixture f{nucseg::raster::BinaryGrid(23, 16), nucseg::raster::BinaryGrid(23, 16),
                      nucseg::raster::BinaryGrid(23, 16), nucseg::raster::BinaryGrid(46, 16),
                      0, 0, 0};
    paint_disk(f.disk1, cx1, cy, r);
    paint_disk(f.disk2, cx2, cy, r);
    paint_disk(f.merged, cx1, cy, r);
    paint_disk(f.merged, cx2, cy, r);
    // the same two disks, the second translated clear of the first by a whole
    // number of pixels so its raster is preserved exactly
    paint_disk(f.separated, cx1, cy, r);
    paint_disk(f.separated, cx2 + 11.0, cy, r);
    const double half = (cx2 - cx1) / 2.0;
    const double h = std::sqrt(r * r - half * half);
    f.inter_x = cx1 + half;
    f.inter_y_top = cy - h;
    f.inter_y_bottom = cy + h;
    return f;
}

} // namespace testsupport
