// Copyright (c) 2026 @squid consultancy group (scg)
// All rights reserved.
// licensed under the apache license 2.0.

#include <catch2/catch.hpp>

#include "nucseg/raster.hpp"
#include "nucseg/synth.hpp"
#include "support/helpers.hpp"

using namespace nucseg::raster;
using nucseg::ValidationError;
using testsupport::labels_from;
using testsupport::mask_from;

TEST_CASE("connected_components basic cases") {
    SECTION("all-background grid has no components") {
        BinaryGrid mask(4, 4);
        const LabelMap labels = connected_components(mask, Connectivity::eight);
        CHECK(labels.max_label() == 0);
    }
    SECTION("diagonal pixels join under eight-connectivity only") {
        BinaryGrid mask(3, 3);
        mask.set(0, 0, true);
        mask.set(1, 1, true);
        CHECK(connected_components(mask, Connectivity::eight).max_label() == 1);
        CHECK(connected_components(mask, Connectivity::four).max_label() == 2);
    }
    SECTION("labels follow row-major first-encounter order") {
        const auto mask = mask_from({
            ".#.#",
            "....",
            "#...",
        });
        const LabelMap labels = connected_components(mask, Connectivity::four);
        CHECK(labels.at(1, 0) == 1);
        CHECK(labels.at(3, 0) == 2);
        CHECK(labels.at(0, 2) == 3);
    }
    SECTION("repeated calls agree") {
        nucseg::synth::SplitMix64 rng(17);
        for (int i = 0; i < 20; ++i) {
            const auto mask = testsupport::random_mask(rng, 12, 0.5);
            CHECK(connected_components(mask, Connectivity::eight) ==
                  connected_components(mask, Connectivity::eight));
        }
    }
}

TEST_CASE("connected component count: eight never exceeds four") {
    nucseg::synth::SplitMix64 rng(5);
    for (int i = 0; i < 100; ++i) {
        const auto mask = testsupport::random_mask(rng, 16, rng.next_in(0.1, 0.9));
        const int eight = connected_components(mask, Connectivity::eight).max_label();
        const int four = connected_components(mask, Connectivity::four).max_label();
        CHECK(eight <= four);
    }
}

TEST_CASE("relabel_compact") {
    SECTION("remaps preserving scan order") {
        const auto labels = labels_from({".773"});
        const LabelMap compact = relabel_compact(labels);
        CHECK(compact.at(0, 0) == 0);
        CHECK(compact.at(1, 0) == 1);
        CHECK(compact.at(2, 0) == 1);
        CHECK(compact.at(3, 0) == 2);
    }
    SECTION("idempotent on compact maps") {
        const auto labels = labels_from({
            "11.2",
            "..22",
        });
        CHECK(relabel_compact(labels) == labels);
    }
    SECTION("all-zero map unchanged") {
        const LabelMap labels(3, 2);
        CHECK(relabel_compact(labels) == labels);
    }
    SECTION("preserves the pixel partition on random maps") {
        nucseg::synth::SplitMix64 rng(23);
        for (int i = 0; i < 30; ++i) {
            const auto labels = testsupport::random_label_map(rng, 12, 4);
            const LabelMap compact = relabel_compact(labels);
            CHECK(relabel_compact(compact) == compact);
            for (int y = 0; y < labels.height(); ++y)
                for (int x = 0; x < labels.width(); ++x)
                    for (int y2 = 0; y2 < labels.height(); ++y2)
                        for (int x2 = 0; x2 < labels.width(); ++x2) {
                            const bool same_before =
                                labels.at(x, y) == labels.at(x2, y2);
                            const bool same_after =
                                compact.at(x, y) == compact.at(x2, y2);
                            if (same_before != same_after) {
                                FAIL("partition changed at (" << x << "," << y << ")");
                            }
                        }
        }
    }
}

TEST_CASE("extract_binary") {
    const auto labels = labels_from({
        "11.2",
        "11.2",
    });
    SECTION("extracts one instance") {
        const BinaryGrid one = extract_binary(labels, 1);
        CHECK(one.foreground_count() == 4);
        CHECK(one.at(0, 0));
        CHECK_FALSE(one.at(3, 0));
    }
    SECTION("absent id yields an all-background grid") {
        CHECK(extract_binary(labels, 99).foreground_count() == 0);
    }
    SECTION("second instance only") {
        const BinaryGrid two = extract_binary(labels, 2);
        CHECK(two.foreground_count() == 2);
        CHECK(two.at(3, 1));
    }
    SECTION("non-positive id is rejected") {
        CHECK_THROWS_AS(extract_binary(labels, 0), ValidationError);
    }
}

TEST_CASE("grid construction validates dimensions") {
    CHECK_THROWS_AS(BinaryGrid(0, 3), ValidationError);
    CHECK_THROWS_AS(LabelMap(4, 0), ValidationError);
    CHECK_THROWS_AS(ScalarField(-1, 2), ValidationError);
}

TEST_CASE("threshold binarizes strictly above the cut") {
    ScalarField field(3, 1);
    field.set(0, 0, 0.5);
    field.set(1, 0, 0.500001);
    field.set(2, 0, 0.2);
    const BinaryGrid mask = threshold(field, 0.5);
    CHECK_FALSE(mask.at(0, 0));
    CHECK(mask.at(1, 0));
    CHECK_FALSE(mask.at(2, 0));
}
