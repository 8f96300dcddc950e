// Copyright (c) 2026 @squid consultancy group (scg)
// All rights reserved.
// licensed under the apache license 2.0.

/**
 * @file nucseg_main.cpp
 * @brief Command-line front end: bend, loss, metrics, postprocess, synth
 *
 * Exit codes: 0 success, 1 usage error, 2 I/O or format error,
 * 3 validation error. Diagnostics go to standard error; machine-readable
 * output goes to standard output or to --out files.
 */

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "nucseg/codec.hpp"
#include "nucseg/contour.hpp"
#include "nucseg/hover.hpp"
#include "nucseg/loss.hpp"
#include "nucseg/metrics.hpp"
#include "nucseg/raster.hpp"
#include "nucseg/synth.hpp"

namespace {

using namespace nucseg;

// Grayscale code for a bending-energy value, one bin per pattern group.
int overlay_gray(double be) {
    if (be < 0.15) return 50;     // straight
    if (be < 0.85) return 100;    // ~0.28
    if (be < 1.70) return 150;    // sqrt(2)
    if (be < 4.80) return 200;    // 2.0
    return 250;                   // 9.66 and capped points
}

int run_bend(const std::string& mask_path, double cap, const std::string& csv_path,
             const std::string& overlay_path) {
    const raster::BinaryGrid mask = codec::read_pgm_binary(codec::load_bytes(mask_path));
    contour::BendConfig cfg;
    cfg.be_cap = cap;

    auto contours = contour::trace_outer_contours(mask);
    std::size_t m = 0;
    double sum = 0.0;
    for (auto& c : contours) {
        contour::annotate_bending(c, cfg);
        if (c.points.size() < 3) continue;
        m += c.points.size();
        for (double be : c.per_point_be) sum += be;
    }
    const double l_bend = m == 0 ? 0.0 : sum / static_cast<double>(m);

    if (!csv_path.empty()) {
        std::ofstream csv(csv_path, std::ios::trunc);
        if (!csv) throw FormatError("cannot open file for writing: " + csv_path, 0);
        csv << "contour_id,point_index,x,y,be\n";
        for (std::size_t ci = 0; ci < contours.size(); ++ci) {
            const auto& c = contours[ci];
            for (std::size_t i = 0; i < c.points.size(); ++i) {
                char line[128];
                std::snprintf(line, sizeof(line), "%zu,%zu,%d,%d,%.6f\n", ci, i,
                              c.points[i].x, c.points[i].y, c.per_point_be[i]);
                csv << line;
            }
        }
        if (!csv) throw FormatError("write failure: " + csv_path, 0);
    }

    if (!overlay_path.empty()) {
        // per pixel, the strongest bin among the positions that visit it
        raster::LabelMap overlay(mask.width(), mask.height());
        for (const auto& c : contours) {
            if (c.points.size() < 3) continue;
            for (std::size_t i = 0; i < c.points.size(); ++i) {
                const auto p = c.points[i];
                overlay.set(p.x, p.y,
                            std::max(overlay.at(p.x, p.y), overlay_gray(c.per_point_be[i])));
            }
        }
        codec::Bytes bytes;
        {
            const std::string header = "P5\n" + std::to_string(mask.width()) + " " +
                                       std::to_string(mask.height()) + "\n255\n";
            bytes.assign(header.begin(), header.end());
            for (int y = 0; y < mask.height(); ++y) {
                for (int x = 0; x < mask.width(); ++x) {
                    bytes.push_back(static_cast<std::uint8_t>(overlay.at(x, y)));
                }
            }
        }
        codec::save_bytes(overlay_path, bytes);
    }

    std::printf("m=%zu l_bend=%.6f\n", m, l_bend);
    return 0;
}

int run_loss(const std::string& pred_path, const std::string& gt_path, double alpha,
             const std::string& l1_name) {
    static const std::map<std::string, loss::LossKind> kinds = {
        {"ce", loss::LossKind::cross_entropy},
        {"dice", loss::LossKind::dice_loss},
        {"mse", loss::LossKind::mse},
    };
    const raster::ScalarField pred = codec::read_sf32(codec::load_bytes(pred_path));
    const raster::BinaryGrid gt = codec::read_pgm_binary(codec::load_bytes(gt_path));
    loss::LossConfig cfg;
    cfg.alpha = alpha;
    cfg.l1_kind = kinds.at(l1_name);
    const loss::LossBreakdown breakdown = loss::total_loss(pred, gt, cfg);
    std::printf("l1=%.6f l_bend=%.6f total=%.6f\n", breakdown.l1, breakdown.l_bend,
                breakdown.total);
    return 0;
}

int run_metrics(const std::string& gt_path, const std::string& pred_path,
                const std::string& json_path) {
    const raster::LabelMap gt = codec::read_pgm_label(codec::load_bytes(gt_path));
    const raster::LabelMap pred = codec::read_pgm_label(codec::load_bytes(pred_path));
    const metrics::MetricsReport report = metrics::evaluate(gt, pred);
    const std::string json = metrics::to_json(report);
    if (!json_path.empty()) {
        std::ofstream out(json_path, std::ios::trunc);
        if (!out) throw FormatError("cannot open file for writing: " + json_path, 0);
        out << json << "\n";
        if (!out) throw FormatError("write failure: " + json_path, 0);
    }
    std::printf("%s\n", json.c_str());
    return 0;
}

int run_postprocess(const std::string& prob_path, const std::string& hover_h_path,
                    const std::string& hover_v_path, const std::string& out_path,
                    double tau, int min_size) {
    const raster::ScalarField prob = codec::read_sf32(codec::load_bytes(prob_path));
    hover::HoVerMaps maps{codec::read_sf32(codec::load_bytes(hover_h_path)),
                          codec::read_sf32(codec::load_bytes(hover_v_path))};
    hover::PostprocessConfig cfg;
    cfg.edge_threshold = tau;
    cfg.min_marker_size = min_size;
    const raster::LabelMap result = hover::postprocess(prob, maps, cfg);
    codec::save_bytes(out_path, codec::write_pgm(result));
    return 0;
}

int run_synth(const std::string& out_dir, int width, int height, int count,
              int overlap_pairs, std::uint64_t seed) {
    synth::SceneParams params;
    params.width = width;
    params.height = height;
    params.count = count;
    params.overlap_pairs = overlap_pairs;
    params.seed = seed;
    const synth::Scene scene = synth::gen_scene(params);

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw FormatError("cannot create directory: " + out_dir, 0);

    const auto dir = std::filesystem::path(out_dir);
    codec::save_bytes((dir / "gt.pgm").string(), codec::write_pgm(scene.gt));
    codec::save_bytes((dir / "prob.sf32").string(), codec::write_sf32(scene.prob));
    codec::save_bytes((dir / "hover_h.sf32").string(),
                      codec::write_sf32(scene.hover_maps.horizontal));
    codec::save_bytes((dir / "hover_v.sf32").string(),
                      codec::write_sf32(scene.hover_maps.vertical));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"nuclei-contour toolkit: bending loss, metrics, watershed post-processing"};
    app.require_subcommand(1);

    // bend
    std::string bend_mask, bend_csv, bend_overlay;
    double bend_cap = 24.0;
    auto* bend = app.add_subcommand("bend", "bending loss of a mask's contours");
    bend->add_option("--mask", bend_mask, "input mask (binary PGM)")->required();
    bend->add_option("--cap", bend_cap, "bending energy at reversal points");
    bend->add_option("--csv", bend_csv, "write per-point CSV here");
    bend->add_option("--overlay", bend_overlay, "write BE-bin overlay PGM here");

    // loss
    std::string loss_pred, loss_gt, loss_l1;
    double loss_alpha = 1.0;
    auto* loss_cmd = app.add_subcommand("loss", "composite loss of a prediction");
    loss_cmd->add_option("--pred", loss_pred, "prediction (sf32)")->required();
    loss_cmd->add_option("--gt", loss_gt, "ground truth mask (binary PGM)")->required();
    loss_cmd->add_option("--alpha", loss_alpha, "bending weight")->required();
    loss_cmd->add_option("--l1", loss_l1, "conventional term: ce|dice|mse")
        ->required()
        ->check(CLI::IsMember({"ce", "dice", "mse"}));

    // metrics
    std::string metrics_gt, metrics_pred, metrics_json;
    auto* metrics_cmd = app.add_subcommand("metrics", "AJI/Dice/RQ/SQ/PQ report");
    metrics_cmd->add_option("--gt", metrics_gt, "ground truth labels (PGM)")->required();
    metrics_cmd->add_option("--pred", metrics_pred, "predicted labels (PGM)")->required();
    metrics_cmd->add_option("--json", metrics_json, "also write the JSON report here");

    // postprocess
    std::string pp_prob, pp_h, pp_v, pp_out;
    double pp_tau = 0.4;
    int pp_min_size = 10;
    auto* pp = app.add_subcommand("postprocess", "split instances via marker watershed");
    pp->add_option("--prob", pp_prob, "probability map (sf32)")->required();
    pp->add_option("--hover-h", pp_h, "horizontal distance map (sf32)")->required();
    pp->add_option("--hover-v", pp_v, "vertical distance map (sf32)")->required();
    pp->add_option("--out", pp_out, "output label map (16-bit PGM)")->required();
    pp->add_option("--tau", pp_tau, "edge-energy threshold");
    pp->add_option("--min-size", pp_min_size, "minimum marker size in pixels");

    // synth
    std::string synth_out;
    int synth_width = 96, synth_height = 96, synth_count = 4, synth_overlap = 0;
    std::uint64_t synth_seed = 1;
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic scene");
    synth_cmd->add_option("--out", synth_out, "output directory")->required();
    synth_cmd->add_option("--width", synth_width, "scene width")->required();
    synth_cmd->add_option("--height", synth_height, "scene height")->required();
    synth_cmd->add_option("--count", synth_count, "instance count")->required();
    synth_cmd->add_option("--overlap-pairs", synth_overlap, "touching pairs")->required();
    synth_cmd->add_option("--seed", synth_seed, "generator seed")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);   // help text to stdout, exit 0
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 1;
    }

    try {
        if (bend->parsed()) return run_bend(bend_mask, bend_cap, bend_csv, bend_overlay);
        if (loss_cmd->parsed()) return run_loss(loss_pred, loss_gt, loss_alpha, loss_l1);
        if (metrics_cmd->parsed()) return run_metrics(metrics_gt, metrics_pred, metrics_json);
        if (pp->parsed()) {
            return run_postprocess(pp_prob, pp_h, pp_v, pp_out, pp_tau, pp_min_size);
        }
        if (synth_cmd->parsed()) {
            return run_synth(synth_out, synth_width, synth_height, synth_count,
                             synth_overlap, synth_seed);
        }
    } catch (const nucseg::FormatError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const nucseg::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const nucseg::CapacityError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 1;
}
