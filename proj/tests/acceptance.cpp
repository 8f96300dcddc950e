// Copyright (c) 2026 @squid consultancy group (scg)
// All rights reserved.
// licensed under the apache license 2.0.

/**
 * @file acceptance.cpp
 * @brief End-to-end acceptance suite
 *
 * Runs the nine acceptance checks at their pinned tolerances and prints one
 * PASS/FAIL line per criterion. The process exits nonzero if any criterion
 * fails.
 */

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "nucseg/codec.hpp"
#include "nucseg/contour.hpp"
#include "nucseg/hover.hpp"
#include "nucseg/loss.hpp"
#include "nucseg/metrics.hpp"
#include "nucseg/raster.hpp"
#include "nucseg/synth.hpp"
#include "support/helpers.hpp"
#include "support/oracles.hpp"

using namespace nucseg;

namespace {

int failures = 0;

struct Criterion {
    const char* id;
    std::string detail;
    bool ok = true;

    explicit Criterion(const char* name) : id(name) {}

    void require(bool condition, const std::string& what) {
        if (!condition) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }

    ~Criterion() {
        if (ok) {
            std::printf("PASS %s\n", id);
        } else {
            std::printf("FAIL %s: %s\n", id, detail.c_str());
            ++failures;
        }
    }
};

double max_point_be(const raster::BinaryGrid& mask, contour::PixelPoint* where) {
    double best = 0.0;
    for (auto& c : contour::trace_outer_contours(mask)) {
        contour::annotate_bending(c);
        if (c.points.size() < 3) continue;
        for (std::size_t i = 0; i < c.per_point_be.size(); ++i)
            if (c.per_point_be[i] > best) {
                best = c.per_point_be[i];
                if (where) *where = c.points[i];
            }
    }
    return best;
}

void criterion1_pattern_table() {
    Criterion c("C1 pattern-table");
    const auto start = std::chrono::steady_clock::now();
    const auto patterns = contour::enumerate_patterns();
    c.require(patterns.size() == 28, "expected 28 patterns");
    std::map<long long, int> groups;   // BE rounded to 1e-3
    for (const auto& p : patterns) groups[std::llround(p.be * 1000.0)]++;
    c.require(groups.size() == 5, "expected exactly 5 distinct groups");
    const double expected[5] = {0.0, 0.2843, 1.4142, 2.0, 9.657};
    const int sizes[5] = {4, 8, 4, 4, 8};
    for (int i = 0; i < 5; ++i) {
        bool found = false;
        for (const auto& [key, n] : groups) {
            if (std::abs(key / 1000.0 - expected[i]) <= 1e-3) {
                found = true;
                c.require(n == sizes[i],
                          "group " + std::to_string(expected[i]) + " has " +
                              std::to_string(n) + " patterns, expected " +
                              std::to_string(sizes[i]));
            }
        }
        c.require(found, "missing group near " + std::to_string(expected[i]));
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.require(elapsed < 1.0, "runtime exceeded 1 s");
}

void criterion2_hand_fixtures() {
    Criterion c("C2 hand-fixtures");
    const double square3 = contour::bending_loss(testsupport::filled_rect(5, 5, 1, 1, 3, 3));
    const double square5 = contour::bending_loss(testsupport::filled_rect(9, 9, 2, 2, 5, 5));
    const double rect = contour::bending_loss(testsupport::filled_rect(14, 9, 2, 2, 10, 5));
    c.require(std::abs(square3 - 1.0) <= 1e-9,
              "3x3 square: " + std::to_string(square3));
    c.require(std::abs(square5 - 0.5) <= 1e-9,
              "5x5 square: " + std::to_string(square5));
    c.require(std::abs(rect - 8.0 / 26.0) <= 1e-9,
              "5x10 rectangle: " + std::to_string(rect));
}

void criterion3_rotation_invariance() {
    Criterion c("C3 rotation-invariance");
    synth::SplitMix64 rng(20260808);
    for (int i = 0; i < 100; ++i) {
        const auto mask = testsupport::random_mask(rng, 32, rng.next_in(0.15, 0.85));
        const double base = contour::bending_loss(mask);
        for (int t = 1; t < 8; ++t) {
            const double value = contour::bending_loss(testsupport::dihedral(mask, t));
            if (std::abs(value - base) > 1e-12) {
                c.require(false, "mask " + std::to_string(i) + " symmetry " +
                                     std::to_string(t) + " deviates by " +
                                     std::to_string(std::abs(value - base)));
                return;
            }
        }
    }
}

void criterion4_metric_oracle() {
    Criterion c("C4 metric-oracle");
    synth::SplitMix64 rng(424242);
    for (int i = 0; i < 200; ++i) {
        const int side = 4 + static_cast<int>(rng.next() % 13);
        const auto gt = testsupport::random_label_map(rng, side, 4);
        const auto pred = testsupport::random_label_map(rng, side, 4);
        metrics::MetricsReport r;
        try {
            r = metrics::evaluate(gt, pred);
        } catch (const std::exception& e) {
            c.require(false, std::string("evaluate threw: ") + e.what());
            return;
        }
        const auto o = testsupport::brute_evaluate(raster::relabel_compact(gt),
                                                   raster::relabel_compact(pred));
        const bool agree = std::abs(r.aji - o.aji) <= 1e-9 &&
                           std::abs(r.dice - o.dice) <= 1e-9 &&
                           std::abs(r.rq - o.rq) <= 1e-9 &&
                           std::abs(r.sq - o.sq) <= 1e-9 &&
                           std::abs(r.pq - o.pq) <= 1e-9 && r.tp == o.tp &&
                           r.fp == o.fp && r.fn == o.fn;
        if (!agree) {
            c.require(false, "case " + std::to_string(i) + " disagrees with oracle");
            return;
        }
        if (std::abs(r.pq - r.rq * r.sq) > 1e-12) {
            c.require(false, "pq != rq*sq at case " + std::to_string(i));
            return;
        }
    }
}

void criterion5_merged_contour_signal() {
    Criterion c("C5 merged-contour-signal");
    const auto fixture = testsupport::disk_pair_fixture();
    contour::PixelPoint at{};
    const double peak = max_point_be(fixture.merged, &at);
    c.require(peak >= 4.8, "merged max per-point BE " + std::to_string(peak) +
                               " < 4.8 (largest value a rasterized union of two "
                               "convex disks can produce is 2.0)");
    const double dist =
        std::min(std::hypot(at.x - fixture.inter_x, at.y - fixture.inter_y_top),
                 std::hypot(at.x - fixture.inter_x, at.y - fixture.inter_y_bottom));
    c.require(dist <= 2.0, "peak lies " + std::to_string(dist) +
                               " px from the nearest true intersection");
    c.require(max_point_be(fixture.disk1, nullptr) <= 2.0, "disk1 exceeds 2.0");
    c.require(max_point_be(fixture.disk2, nullptr) <= 2.0, "disk2 exceeds 2.0");
    const double merged = contour::bending_loss(fixture.merged);
    const double separated = contour::bending_loss(fixture.separated);
    c.require(merged > separated,
              "bending_loss(merged)=" + std::to_string(merged) +
                  " not above bending_loss(separated)=" + std::to_string(separated));
    const double naive_merged = testsupport::naive_bending_loss(fixture.merged);
    const double naive_separated = testsupport::naive_bending_loss(fixture.separated);
    c.require(naive_merged > naive_separated, "naive walk disagrees on the inequality");
}

void criterion6_postprocess_round_trip() {
    Criterion c("C6 postprocess-round-trip");
    const auto start = std::chrono::steady_clock::now();
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        synth::SceneParams params;
        params.width = 96;
        params.height = 96;
        params.count = 5;
        params.overlap_pairs = 0;
        params.seed = seed;
        const auto scene = synth::gen_scene(params);
        const auto out = hover::postprocess(scene.prob, scene.hover_maps);
        const double aji = metrics::evaluate(scene.gt, out).aji;
        if (aji != 1.0) {
            c.require(false, "disjoint seed " + std::to_string(seed) + " AJI " +
                                 std::to_string(aji) + " != 1.0");
            return;
        }
    }
    for (std::uint64_t seed = 101; seed <= 120; ++seed) {
        synth::SceneParams params;
        params.width = 96;
        params.height = 96;
        params.count = 4;
        params.overlap_pairs = 1;
        params.seed = seed;
        const auto scene = synth::gen_scene(params);
        const auto out = hover::postprocess(scene.prob, scene.hover_maps);
        std::set<int> labels_on_pair;
        for (int y = 0; y < out.height(); ++y)
            for (int x = 0; x < out.width(); ++x) {
                const int g = scene.gt.at(x, y);
                if ((g == 1 || g == 2) && out.at(x, y) > 0)
                    labels_on_pair.insert(out.at(x, y));
            }
        const double aji = metrics::evaluate(scene.gt, out).aji;
        if (labels_on_pair.size() != 2 || aji < 0.80) {
            c.require(false, "touching seed " + std::to_string(seed) + " split into " +
                                 std::to_string(labels_on_pair.size()) + " with AJI " +
                                 std::to_string(aji));
            return;
        }
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.require(elapsed < 10.0,
              "runtime " + std::to_string(elapsed) + " s exceeded 10 s");
}

void criterion7_loss_composition() {
    Criterion c("C7 loss-composition");
    synth::SplitMix64 rng(777);
    for (int i = 0; i < 50; ++i) {
        const int w = 3 + static_cast<int>(rng.next() % 12);
        const int h = 3 + static_cast<int>(rng.next() % 12);
        raster::ScalarField pred(w, h);
        raster::BinaryGrid gt(w, h);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                pred.set(x, y, rng.next_unit());
                gt.set(x, y, rng.next_unit() < 0.5);
            }
        loss::LossConfig cfg;
        cfg.alpha = rng.next_in(0.0, 4.0);
        cfg.l1_kind = static_cast<loss::LossKind>(rng.next() % 3);
        const auto b = loss::total_loss(pred, gt, cfg);
        if (std::abs(b.total - (b.l1 + cfg.alpha * b.l_bend)) > 1e-12) {
            c.require(false, "composition violated at case " + std::to_string(i));
            return;
        }
        loss::LossConfig zero = cfg;
        zero.alpha = 0.0;
        const auto z = loss::total_loss(pred, gt, zero);
        if (z.total != z.l1) {
            c.require(false, "alpha=0 does not reduce to l1 at case " + std::to_string(i));
            return;
        }
    }
}

void criterion8_refiner_properties() {
    Criterion c("C8 refiner-properties");
    // monotone non-increasing objective on 50 seeded scenes
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        synth::SceneParams params;
        params.width = 48;
        params.height = 48;
        params.count = 2;
        params.radius_min = 4.0;
        params.radius_max = 7.0;
        params.seed = seed;
        const auto scene = synth::gen_scene(params);
        const auto noisy = synth::perturb(scene, 0.08, seed * 31 + 1);
        loss::LossConfig cfg;
        cfg.alpha = 1.0;
        cfg.l1_kind = loss::LossKind::mse;
        loss::RefineTrace trace;
        const auto out = loss::refine_mask(noisy.prob, raster::threshold(noisy.prob, 0.5),
                                           cfg, {}, 3, &trace);
        double prev = trace.initial_total;
        for (double t : trace.pass_totals) {
            if (t > prev + 1e-12) {
                c.require(false, "objective increased on seed " + std::to_string(seed));
                return;
            }
            prev = t;
        }
        (void)out;
    }
    // convergence fixed point and the dumbbell split
    const int W = 15, H = 7;
    raster::BinaryGrid init(W, H);
    raster::ScalarField prob(W, H);
    for (int y = 1; y <= 5; ++y)
        for (int x = 1; x <= 5; ++x) {
            init.set(x, y, true);
            prob.set(x, y, 1.0);
            init.set(x + 8, y, true);
            prob.set(x + 8, y, 1.0);
        }
    for (int x = 6; x <= 8; ++x) {
        init.set(x, 3, true);
        prob.set(x, 3, 0.45);
    }
    loss::LossConfig cfg;
    cfg.alpha = 1.0;
    cfg.l1_kind = loss::LossKind::mse;
    const auto out = loss::refine_mask(prob, init, cfg, {}, 32, nullptr);
    const int components =
        raster::connected_components(out, raster::Connectivity::eight).max_label();
    c.require(components == 2,
              "dumbbell converged to " + std::to_string(components) + " components");
    c.require(loss::refine_mask(prob, out, cfg, {}, 32, nullptr) == out,
              "refinement is not idempotent at convergence");
}

void criterion9_codec_round_trip() {
    Criterion c("C9 codec-round-trip");
    synth::SplitMix64 rng(31337);
    for (int i = 0; i < 100; ++i) {
        const int w = 1 + static_cast<int>(rng.next() % 17);
        const int h = 1 + static_cast<int>(rng.next() % 17);
        raster::BinaryGrid mask(w, h);
        raster::LabelMap labels(w, h);
        raster::ScalarField field(w, h);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                mask.set(x, y, rng.next_unit() < 0.5);
                labels.set(x, y, static_cast<int>(rng.next() % 65536));
                field.set(x, y, static_cast<float>(rng.next_in(-100.0, 100.0)));
            }
        if (!(codec::read_pgm_binary(codec::write_pgm(mask)) == mask)) {
            c.require(false, "binary mask round trip failed at case " + std::to_string(i));
            return;
        }
        if (!(codec::read_pgm_label(codec::write_pgm(labels)) == labels)) {
            c.require(false, "label map round trip failed at case " + std::to_string(i));
            return;
        }
        if (!(codec::read_sf32(codec::write_sf32(field)) == field)) {
            c.require(false, "scalar field round trip failed at case " + std::to_string(i));
            return;
        }
    }
}

} // namespace

int main() {
    criterion1_pattern_table();
    criterion2_hand_fixtures();
    criterion3_rotation_invariance();
    criterion4_metric_oracle();
    criterion5_merged_contour_signal();
    criterion6_postprocess_round_trip();
    criterion7_loss_composition();
    criterion8_refiner_properties();
    criterion9_codec_round_trip();
    if (failures > 0) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
