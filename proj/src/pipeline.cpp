// Copyright (c) 2026 The nuzoom Authors.
// Licensed under the Apache License, Version 2.0.

#include "nuzoom/pipeline.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <fstream>
#include <future>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "nuzoom/box_transform.hpp"
#include "nuzoom/image_io.hpp"
#include "nuzoom/offset_io.hpp"
#include "nuzoom/rng.hpp"
#include "nuzoom/warp.hpp"
#include "nuzoom/zoom_objective.hpp"

namespace nuzoom {

using ordered_json = nlohmann::ordered_json;

GridDims RunConfig::offset_dims() const {
    auto low = [&](int n) {
        return std::max(2, static_cast<int>(std::lround(n * offset_scale)));
    };
    return {low(process_dims.height), low(process_dims.width)};
}

void RunConfig::validate() const {
    if (!process_dims.valid())
        throw std::invalid_argument("RunConfig: process_dims must be >= 2x2");
    if (!(offset_scale > 0.0 && offset_scale <= 1.0))
        throw std::invalid_argument("RunConfig: offset_scale must be in (0,1]");
    if (jobs < 1) throw std::invalid_argument("RunConfig: jobs must be >= 1");
    SolverConfig s = solver;
    s.offset_dims = offset_dims();
    s.validate();
    size_classes.validate();
}

namespace {

std::string scene_tag(int id) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "scene_%06d", id);
    return buf;
}

// Separable Gaussian blur, kernel truncated at three sigmas, reflecting at
// the borders via clamped taps.
ScalarField gaussian_blur(const ScalarField& src, double sigma_nodes) {
    if (sigma_nodes <= 0.0) return src;
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma_nodes)));
    std::vector<double> kernel(2 * radius + 1);
    double norm = 0.0;
    for (int k = -radius; k <= radius; ++k) {
        kernel[k + radius] = std::exp(-0.5 * k * k / (sigma_nodes * sigma_nodes));
        norm += kernel[k + radius];
    }
    for (double& v : kernel) v /= norm;

    const GridDims d = src.dims();
    ScalarField tmp(d), out(d);
    for (int i = 0; i < d.height; ++i)
        for (int j = 0; j < d.width; ++j) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k)
                acc += kernel[k + radius] *
                       src(i, std::clamp(j + k, 0, d.width - 1));
            tmp(i, j) = acc;
        }
    for (int i = 0; i < d.height; ++i)
        for (int j = 0; j < d.width; ++j) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k)
                acc += kernel[k + radius] *
                       tmp(std::clamp(i + k, 0, d.height - 1), j);
            out(i, j) = acc;
        }
    return out;
}

} // namespace

GridBuild build_scene_grid(const std::vector<BBox>& boxes,
                           const RunConfig& cfg, uint64_t scene_seed) {
    const GridDims low_dims = cfg.offset_dims();
    GridBuild build;

    if (cfg.parametrization == Parametrization::offset) {
        SolverConfig solver = cfg.solver;
        solver.offset_dims = low_dims;
        solver.seed = scene_seed;
        const SolverResult result =
            optimize_offsets(boxes, cfg.process_dims, solver);
        build.offsets_low = result.offsets;
        build.trace.initial_loss = result.trace.front().loss;
        build.trace.final_loss = result.trace.back().loss;
        build.trace.final_mean_ratio = result.trace.back().mean_ratio;
        build.trace.steps = result.trace.back().iteration;
    } else {
        // Saliency source: the boxes themselves, rasterized at the offset
        // resolution and blurred.
        ScalarField sal(low_dims, 0.0);
        for (const BBox& b : boxes) {
            const BoxMask mask = rasterize_box_mask(b, low_dims);
            for (int i = 0; i < low_dims.height; ++i)
                for (int j = 0; j < low_dims.width; ++j)
                    sal(i, j) = std::max(sal(i, j), mask.values(i, j));
        }
        const double sigma_nodes =
            cfg.saliency.blur_sigma *
            (std::max(low_dims.height, low_dims.width) - 1);
        sal = gaussian_blur(sal, sigma_nodes);

        GaussianKernelConfig kernel;
        kernel.sigma = cfg.saliency.kernel_sigma;
        kernel.radius =
            cfg.saliency.kernel_radius > 0
                ? cfg.saliency.kernel_radius
                : std::max(1, static_cast<int>(std::ceil(
                                  2.5 * kernel.sigma *
                                  (std::max(low_dims.height, low_dims.width) -
                                   1))));
        const SamplingGrid pulled = saliency_grid({sal}, kernel, low_dims);
        const SamplingGrid uniform_low = make_uniform_grid(low_dims);
        build.offsets_low = zero_offsets(low_dims);
        for (int i = 0; i < low_dims.height; ++i)
            for (int j = 0; j < low_dims.width; ++j) {
                build.offsets_low.dx(i, j) = pulled.u(i, j) - uniform_low.u(i, j);
                build.offsets_low.dy(i, j) = pulled.v(i, j) - uniform_low.v(i, j);
            }

        const SamplingGrid base = make_uniform_grid(cfg.process_dims);
        const OffsetField zero = zero_offsets(cfg.process_dims);
        const OffsetField full =
            upsample_offsets(build.offsets_low, cfg.process_dims);
        build.trace.initial_loss =
            evaluate_zoom_objective(boxes, base, zero, cfg.solver.loss_cfg)
                .total;
        const ZoomObjectiveEval eval =
            evaluate_zoom_objective(boxes, base, full, cfg.solver.loss_cfg);
        build.trace.final_loss = eval.total;
        double mean = 0.0;
        for (double m : eval.ratios) mean += m;
        build.trace.final_mean_ratio = mean / eval.ratios.size();
        build.trace.steps = 0;
    }

    const OffsetField full =
        upsample_offsets(build.offsets_low, cfg.process_dims);
    build.grid =
        apply_offsets(make_uniform_grid(cfg.process_dims), full, true);
    return build;
}

namespace {

SceneOutcome process_scene(const Scene& scene, const RunConfig& cfg) {
    SceneOutcome outcome;
    outcome.scene_id = scene.id;
    const std::string tag = scene_tag(scene.id);

    if (scene.boxes.empty()) {
        outcome.status = SceneStatus::skipped;
        outcome.message = "no boxes";
        return outcome;
    }

    std::vector<BBox> boxes;
    boxes.reserve(scene.boxes.size());
    for (const SceneBox& sb : scene.boxes) boxes.push_back(sb.box);

    const uint64_t scene_seed =
        mix_seed(cfg.seed, static_cast<uint64_t>(scene.id));
    const GridBuild build = build_scene_grid(boxes, cfg, scene_seed);

    save_offset_field(build.offsets_low, cfg.offset_scale,
                      cfg.output_dir / (tag + "_offsets.bin"));

    if (scene.image_path) {
        const Image original = read_netpbm(*scene.image_path);
        const Image warped = warp_image(original, build.grid);
        const char* ext = warped.channel_count() == 3 ? ".ppm" : ".pgm";
        write_netpbm(warped, cfg.output_dir / (tag + "_warped" + ext));
    }

    SizeClassConfig classes = cfg.size_classes;
    classes.reference = cfg.size_reference_override.value_or(scene.image_dims);

    const InverseIndex index = build_inverse_index(build.grid);
    const SamplingGrid base = make_uniform_grid(cfg.process_dims);
    const OffsetField full =
        upsample_offsets(build.offsets_low, cfg.process_dims);
    const ZoomObjectiveEval eval =
        evaluate_zoom_objective(boxes, base, full, cfg.solver.loss_cfg);

    SceneReport report;
    report.scene_id = tag;
    report.out_dims = cfg.process_dims;
    report.trace = build.trace;
    report.distortion = distortion_stats(build.grid, boxes);

    Scene zoomed_scene = scene;
    zoomed_scene.image_path.reset();
    for (size_t b = 0; b < boxes.size(); ++b) {
        const BoxTransformResult fwd =
            forward_box_transform(boxes[b], build.grid, index);
        const BBox back = backward_box_transform(fwd.box, build.grid);
        BoxRecord record;
        record.category = scene.boxes[b].category_id;
        record.original = boxes[b];
        record.zoomed = fwd.box;
        record.zoom_ratio = eval.ratios[b];
        record.zr_area = fwd.box.area() / boxes[b].area();
        record.roundtrip_iou = iou(boxes[b], back);
        record.size_class = classes.classify(boxes[b]);
        record.boundary_snapped = fwd.boundary_snapped;
        record.degenerate_expanded = fwd.degenerate_expanded;
        report.boxes.push_back(record);
        zoomed_scene.boxes[b].box = fwd.box;
    }
    recompute_aggregates(report, classes);

    write_annotations({zoomed_scene},
                      cfg.output_dir / (tag + "_zoomed_annotations.json"),
                      cfg.process_dims);
    std::ofstream rep(cfg.output_dir / (tag + "_report.json"),
                      std::ios::binary);
    rep << emit_report(report);

    outcome.report = std::move(report);
    return outcome;
}

} // namespace

RunSummary run_pipeline(const std::vector<Scene>& scenes,
                        const RunConfig& cfg) {
    cfg.validate();
    std::filesystem::create_directories(cfg.output_dir);

    RunSummary summary;
    summary.scenes.resize(scenes.size());

    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const size_t k = next.fetch_add(1);
            if (k >= scenes.size()) return;
            try {
                summary.scenes[k] = process_scene(scenes[k], cfg);
            } catch (const std::exception& e) {
                summary.scenes[k] = SceneOutcome{
                    scenes[k].id, SceneStatus::failed, e.what(), {}};
            }
        }
    };
    const int jobs =
        std::min<int>(cfg.jobs, static_cast<int>(scenes.size()));
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::future<void>> pool;
        for (int t = 0; t < jobs; ++t)
            pool.push_back(std::async(std::launch::async, worker));
        for (auto& f : pool) f.get();
    }

    std::sort(summary.scenes.begin(), summary.scenes.end(),
              [](const SceneOutcome& a, const SceneOutcome& b) {
                  return a.scene_id < b.scene_id;
              });
    for (const SceneOutcome& s : summary.scenes) {
        if (s.status == SceneStatus::ok) ++summary.ok_count;
        else if (s.status == SceneStatus::skipped) ++summary.skipped_count;
        else ++summary.failed_count;
    }

    std::ofstream out(cfg.output_dir / "run_report.json", std::ios::binary);
    out << summarize_run(summary, cfg);
    return summary;
}

std::string summarize_run(const RunSummary& summary, const RunConfig& cfg) {
    ordered_json j;
    j["config"] = {
        {"process_dims",
         {{"height", cfg.process_dims.height}, {"width", cfg.process_dims.width}}},
        {"offset_scale", cfg.offset_scale},
        {"parametrization",
         cfg.parametrization == Parametrization::offset ? "offset" : "saliency"},
        {"steps", cfg.solver.steps},
        {"learning_rate", cfg.solver.learning_rate},
        {"momentum", cfg.solver.momentum},
        {"alpha", cfg.solver.loss_cfg.alpha},
        {"beta", cfg.solver.loss_cfg.beta},
        {"epsilon", cfg.solver.loss_cfg.epsilon},
        {"reg_weight", cfg.solver.loss_cfg.reg_weight},
        {"seed", cfg.seed},
    };

    ordered_json scenes = ordered_json::array();
    std::array<double, 3> zr_sums{0.0, 0.0, 0.0};
    std::array<int, 3> zr_counts{0, 0, 0};
    double iou_sum = 0.0;
    int iou_count = 0;
    std::optional<double> iou_min;
    int snapped = 0;

    for (const SceneOutcome& s : summary.scenes) {
        ordered_json entry;
        entry["id"] = s.scene_id;
        entry["status"] = s.status == SceneStatus::ok       ? "ok"
                          : s.status == SceneStatus::skipped ? "skipped"
                                                             : "failed";
        if (!s.message.empty()) entry["message"] = s.message;
        if (s.status == SceneStatus::ok) {
            if (s.report.mean_iou) entry["mean_iou"] = *s.report.mean_iou;
            entry["final_loss"] = s.report.trace.final_loss;
            entry["initial_loss"] = s.report.trace.initial_loss;
            for (const BoxRecord& r : s.report.boxes) {
                if (r.boundary_snapped) {
                    ++snapped;
                } else {
                    const int c = static_cast<int>(r.size_class);
                    zr_sums[c] += r.zr_area;
                    ++zr_counts[c];
                }
                iou_sum += r.roundtrip_iou;
                ++iou_count;
                if (!iou_min || r.roundtrip_iou < *iou_min)
                    iou_min = r.roundtrip_iou;
            }
        }
        scenes.push_back(std::move(entry));
    }
    j["scenes"] = std::move(scenes);

    ordered_json agg;
    agg["scenes_ok"] = summary.ok_count;
    agg["scenes_skipped"] = summary.skipped_count;
    agg["scenes_failed"] = summary.failed_count;
    agg["boxes"] = iou_count;
    agg["boundary_snapped"] = snapped;
    if (iou_count > 0) {
        agg["mean_roundtrip_iou"] = iou_sum / iou_count;
        agg["min_roundtrip_iou"] = *iou_min;
    }
    ordered_json zr;
    for (int c = 0; c < 3; ++c) {
        const char* name = size_class_name(static_cast<SizeClass>(c));
        ordered_json entry;
        entry["count"] = zr_counts[c];
        if (zr_counts[c] > 0) entry["mean"] = zr_sums[c] / zr_counts[c];
        zr[name] = std::move(entry);
    }
    agg["zr"] = std::move(zr);
    j["aggregate"] = std::move(agg);
    return j.dump(2) + "\n";
}

} // namespace nuzoom
