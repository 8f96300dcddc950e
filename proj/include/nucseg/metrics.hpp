// Copyright (c) 2026 @squid consultancy group (scg)
// All rights reserved.
// licensed under the apache license 2.0.

/**
 * @file metrics.hpp
 * @brief Instance-segmentation metric suite: AJI, Dice, RQ, SQ, PQ
 *
 * AJI walks ground-truth instances in ascending label order, greedily pairs
 * each with the prediction maximizing the Jaccard index (ties resolved to the
 * smallest predicted label), and divides accumulated intersections by
 * accumulated unions plus the sizes of predictions never selected. A
 * prediction may be selected by several ground-truth instances; only
 * never-selected predictions count as unmatched.
 *
 * The panoptic family matches instance pairs under strict IoU > 0.5, which
 * makes the matching provably injective; RQ is the F1-style recognition
 * quality, SQ the mean matched IoU, and PQ = RQ * SQ.
 */

#pragma once

#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "nucseg/errors.hpp"
#include "nucseg/raster.hpp"

namespace nucseg {
namespace metrics {

// ============================================================================
// Domain types
// ============================================================================

struct MatchedPair {
    int gt_label = 0;
    int pred_label = 0;
    double iou = 0.0;   // strictly above 0.5 by construction
};

struct Matching {
    std::vector<MatchedPair> pairs;
    int tp = 0;
    int fp = 0;
    int fn = 0;
};

struct MetricsReport {
    double aji = 0.0;
    double dice = 0.0;
    double rq = 0.0;
    double sq = 0.0;
    double pq = 0.0;
    int tp = 0;
    int fp = 0;
    int fn = 0;
};

namespace detail {

inline void check_same_dims(int wa, int ha, int wb, int hb, const char* what) {
    if (wa != wb || ha != hb) {
        throw ValidationError(std::string(what) + ": dimension mismatch, " +
                              std::to_string(wa) + "x" + std::to_string(ha) + " vs " +
                              std::to_string(wb) + "x" + std::to_string(hb));
    }
}

// Pixel-count table for all overlapping (gt, pred) label pairs plus
// per-label sizes, built in one pass.
struct Contingency {
    int gt_count = 0;
    int pred_count = 0;
    std::vector<long long> gt_size;                       // indexed 0..gt_count
    std::vector<long long> pred_size;                     // indexed 0..pred_count
    std::vector<std::map<int, long long>> overlap;        // overlap[g][p] for g,p > 0

    Contingency(const raster::LabelMap& gt, const raster::LabelMap& pred) {
        gt_count = gt.max_label();
        pred_count = pred.max_label();
        gt_size.assign(gt_count + 1, 0);
        pred_size.assign(pred_count + 1, 0);
        overlap.assign(gt_count + 1, {});
        for (int y = 0; y < gt.height(); ++y) {
            for (int x = 0; x < gt.width(); ++x) {
                const int g = gt.at(x, y);
                const int p = pred.at(x, y);
                if (g > 0) ++gt_size[g];
                if (p > 0) ++pred_size[p];
                if (g > 0 && p > 0) ++overlap[g][p];
            }
        }
    }
};

} // namespace detail

// ============================================================================
// Operations
// ============================================================================

/// Intersection over union of two masks; 0 when both are empty.
inline double iou(const raster::BinaryGrid& a, const raster::BinaryGrid& b) {
    detail::check_same_dims(a.width(), a.height(), b.width(), b.height(), "iou");
    long long inter = 0;
    long long uni = 0;
    for (int y = 0; y < a.height(); ++y) {
        for (int x = 0; x < a.width(); ++x) {
            const bool va = a.at(x, y);
            const bool vb = b.at(x, y);
            if (va && vb) ++inter;
            if (va || vb) ++uni;
        }
    }
    if (uni == 0) return 0.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

/// Dice coefficient over binarized foregrounds; 1 when both maps are empty.
inline double dice_global(const raster::LabelMap& gt, const raster::LabelMap& pred) {
    detail::check_same_dims(gt.width(), gt.height(), pred.width(), pred.height(),
                            "dice_global");
    long long inter = 0;
    long long size_gt = 0;
    long long size_pred = 0;
    for (int y = 0; y < gt.height(); ++y) {
        for (int x = 0; x < gt.width(); ++x) {
            const bool g = gt.at(x, y) != 0;
            const bool p = pred.at(x, y) != 0;
            if (g) ++size_gt;
            if (p) ++size_pred;
            if (g && p) ++inter;
        }
    }
    if (size_gt + size_pred == 0) return 1.0;
    return 2.0 * static_cast<double>(inter) / static_cast<double>(size_gt + size_pred);
}

/**
 * @brief Aggregated Jaccard index. Expects compacted maps.
 */
inline double aji(const raster::LabelMap& gt, const raster::LabelMap& pred) {
    detail::check_same_dims(gt.width(), gt.height(), pred.width(), pred.height(), "aji");
    const detail::Contingency table(gt, pred);
    if (table.gt_count == 0 && table.pred_count == 0) return 1.0;

    long long numerator = 0;
    long long denominator = 0;
    std::vector<bool> selected(table.pred_count + 1, false);
    for (int g = 1; g <= table.gt_count; ++g) {
        int best_pred = 0;
        double best_jaccard = 0.0;
        long long best_inter = 0;
        long long best_union = 0;
        // ascending pred order, strict improvement: ties keep the smallest label
        for (const auto& [p, inter] : table.overlap[g]) {
            const long long uni = table.gt_size[g] + table.pred_size[p] - inter;
            const double jaccard = static_cast<double>(inter) / static_cast<double>(uni);
            if (jaccard > best_jaccard) {
                best_jaccard = jaccard;
                best_pred = p;
                best_inter = inter;
                best_union = uni;
            }
        }
        if (best_pred == 0) {
            // nothing overlaps this instance; it still weighs the denominator
            denominator += table.gt_size[g];
        } else {
            numerator += best_inter;
            denominator += best_union;
            selected[best_pred] = true;
        }
    }
    for (int p = 1; p <= table.pred_count; ++p) {
        if (!selected[p]) denominator += table.pred_size[p];
    }
    if (denominator == 0) return 1.0;
    return static_cast<double>(numerator) / static_cast<double>(denominator);
}

/**
 * @brief Unique matching of instances under strict IoU > 0.5.
 *
 * Injectivity follows mathematically from the threshold and is asserted.
 * Expects compacted maps; pairs are listed in ascending ground-truth order.
 */
inline Matching match_unique(const raster::LabelMap& gt, const raster::LabelMap& pred) {
    detail::check_same_dims(gt.width(), gt.height(), pred.width(), pred.height(),
                            "match_unique");
    const detail::Contingency table(gt, pred);
    Matching matching;
    std::vector<bool> gt_used(table.gt_count + 1, false);
    std::vector<bool> pred_used(table.pred_count + 1, false);
    for (int g = 1; g <= table.gt_count; ++g) {
        for (const auto& [p, inter] : table.overlap[g]) {
            const long long uni = table.gt_size[g] + table.pred_size[p] - inter;
            if (2 * inter <= uni) continue;   // exact integer form of IoU > 0.5
            if (gt_used[g] || pred_used[p]) {
                throw std::logic_error(
                    "internal assertion: IoU > 0.5 matching is not injective");
            }
            gt_used[g] = true;
            pred_used[p] = true;
            matching.pairs.push_back(
                {g, p, static_cast<double>(inter) / static_cast<double>(uni)});
        }
    }
    matching.tp = static_cast<int>(matching.pairs.size());
    matching.fp = table.pred_count - matching.tp;
    matching.fn = table.gt_count - matching.tp;
    return matching;
}

struct PqScores {
    double rq = 0.0;
    double sq = 0.0;
    double pq = 0.0;
};

/**
 * @brief Recognition, segmentation and panoptic quality from a matching.
 *
 * Conventions: with no instances on either side all three are 1 (perfect
 * empty agreement); with tp = 0 the segmentation quality is 0.
 */
inline PqScores pq_scores(const Matching& matching) {
    PqScores scores;
    if (matching.tp == 0 && matching.fp == 0 && matching.fn == 0) {
        scores.rq = scores.sq = scores.pq = 1.0;
        return scores;
    }
    scores.rq = static_cast<double>(matching.tp) /
                (matching.tp + 0.5 * matching.fp + 0.5 * matching.fn);
    if (matching.tp > 0) {
        double sum = 0.0;
        for (const auto& pair : matching.pairs) sum += pair.iou;
        scores.sq = sum / matching.tp;
    }
    scores.pq = scores.rq * scores.sq;
    return scores;
}

/**
 * @brief Full metric report for one (ground truth, prediction) pair.
 *
 * Both maps are compacted first, so results are invariant under any
 * relabeling of either input.
 */
inline MetricsReport evaluate(const raster::LabelMap& gt, const raster::LabelMap& pred) {
    detail::check_same_dims(gt.width(), gt.height(), pred.width(), pred.height(),
                            "evaluate");
    const raster::LabelMap cgt = raster::relabel_compact(gt);
    const raster::LabelMap cpred = raster::relabel_compact(pred);
    MetricsReport report;
    report.aji = aji(cgt, cpred);
    report.dice = dice_global(cgt, cpred);
    const Matching matching = match_unique(cgt, cpred);
    const PqScores scores = pq_scores(matching);
    report.rq = scores.rq;
    report.sq = scores.sq;
    report.pq = scores.pq;
    report.tp = matching.tp;
    report.fp = matching.fp;
    report.fn = matching.fn;
    return report;
}

/// JSON serialization with exactly the report keys; reals carry 6 decimals.
inline std::string to_json(const MetricsReport& r) {
    char buffer[256];
    std::snprintf(buffer, sizeof(buffer),
                  "{\"aji\":%.6f,\"dice\":%.6f,\"rq\":%.6f,\"sq\":%.6f,\"pq\":%.6f,"
                  "\"tp\":%d,\"fp\":%d,\"fn\":%d}",
                  r.aji, r.dice, r.rq, r.sq, r.pq, r.tp, r.fp, r.fn);
    return std::string(buffer);
}

} // namespace metrics
} // namespace nucseg
