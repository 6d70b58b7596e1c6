// Copyright (c) 2026 The nuzoom Authors.
// Licensed under the Apache License, Version 2.0.

#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "nuzoom/metrics.hpp"
#include "nuzoom/offset_solver.hpp"
#include "nuzoom/pipeline.hpp"
#include "nuzoom/rng.hpp"
#include "nuzoom/zoom_objective.hpp"

using namespace nuzoom;

namespace {

SamplingGrid central_zoom_grid(GridDims dims) {
    SamplingGrid g = make_uniform_grid(dims);
    for (double& u : g.u.data()) u = 0.25 + 0.5 * u;
    for (double& v : g.v.data()) v = 0.25 + 0.5 * v;
    return g;
}

SizeClassConfig reference_640() {
    SizeClassConfig c;
    c.reference = {640, 640};
    return c;
}

} // namespace

TEST_CASE("size classes partition boxes by pixel area") {
    const SizeClassConfig c = reference_640();
    // 20x20 px at 640 -> small; 64x64 -> medium; 200x200 -> large
    CHECK(c.classify(make_bbox(0.1, 0.1, 0.1 + 20.0 / 640, 0.1 + 20.0 / 640)) ==
          SizeClass::small);
    CHECK(c.classify(make_bbox(0.1, 0.1, 0.2, 0.2)) == SizeClass::medium);
    CHECK(c.classify(make_bbox(0.1, 0.1, 0.5, 0.5)) == SizeClass::large);
}

TEST_CASE("compute_zr") {
    SUBCASE("identity grid with node-aligned boxes reports exactly 1.00") {
        const GridDims dims{129, 129};
        const SamplingGrid g = make_uniform_grid(dims);
        const InverseIndex index = build_inverse_index(g);
        const std::vector<BBox> boxes{
            make_bbox(16.0 / 128, 16.0 / 128, 24.0 / 128, 24.0 / 128),
            make_bbox(40.0 / 128, 8.0 / 128, 104.0 / 128, 72.0 / 128),
            make_bbox(96.0 / 128, 96.0 / 128, 124.0 / 128, 120.0 / 128),
        };
        const ZrReport zr = compute_zr(boxes, g, index, reference_640());
        for (int c = 0; c < 3; ++c)
            if (zr.mean[c]) CHECK(*zr.mean[c] == 1.0);
        CHECK(zr.count[0] + zr.count[1] + zr.count[2] == 3);
        CHECK(zr.snapped_excluded == 0);
    }
    SUBCASE("x2 central zoom pushes small boxes toward ZR 4") {
        const GridDims dims{129, 129};
        const SamplingGrid g = central_zoom_grid(dims);
        const InverseIndex index = build_inverse_index(g);
        const std::vector<BBox> boxes{make_bbox(0.45, 0.45, 0.55, 0.55),
                                      make_bbox(0.4, 0.42, 0.48, 0.5)};
        SizeClassConfig classes = reference_640();
        const ZrReport zr = compute_zr(boxes, g, index, classes);
        REQUIRE(zr.mean[static_cast<int>(SizeClass::medium)].has_value());
        CHECK(*zr.mean[static_cast<int>(SizeClass::medium)] ==
              doctest::Approx(4.0).epsilon(0.1));
    }
    SUBCASE("empty classes are absent, not zero") {
        const GridDims dims{33, 33};
        const SamplingGrid g = make_uniform_grid(dims);
        const InverseIndex index = build_inverse_index(g);
        const std::vector<BBox> boxes{make_bbox(0.1, 0.1, 0.9, 0.9)}; // large
        const ZrReport zr = compute_zr(boxes, g, index, reference_640());
        CHECK(!zr.mean[static_cast<int>(SizeClass::small)].has_value());
        CHECK(!zr.mean[static_cast<int>(SizeClass::medium)].has_value());
        CHECK(zr.mean[static_cast<int>(SizeClass::large)].has_value());
    }
    SUBCASE("boundary-snapped boxes are excluded and counted") {
        const GridDims dims{17, 17};
        SamplingGrid g = make_uniform_grid(dims);
        for (double& u : g.u.data()) u = 0.45 + 0.1 * u;
        for (double& v : g.v.data()) v = 0.45 + 0.1 * v;
        const InverseIndex index = build_inverse_index(g);
        const std::vector<BBox> boxes{make_bbox(0.01, 0.01, 0.12, 0.12)};
        const ZrReport zr = compute_zr(boxes, g, index, reference_640());
        CHECK(zr.snapped_excluded == 1);
        CHECK(zr.count[0] + zr.count[1] + zr.count[2] == 0);
    }
}

TEST_CASE("zr and mask-mass zoom ratios agree on monotone grids") {
    // two readings of the same quantity: box-area route vs mask-sum route
    const GridDims dims{65, 65};
    Rng rng(55);
    // smooth, fold-free warp: gentle low-resolution offsets upsampled.
    // Strong within-box magnification gradients make the two readings
    // genuinely diverge, so keep the warp mild like solver output.
    OffsetField low = zero_offsets({4, 4});
    for (double& v : low.dx.data()) v = 0.02 * rng.normal();
    for (double& v : low.dy.data()) v = 0.02 * rng.normal();
    const SamplingGrid smooth = apply_offsets(
        make_uniform_grid(dims), upsample_offsets(low, dims), true);
    const SamplingGrid grids[] = {central_zoom_grid(dims), smooth};
    for (const SamplingGrid& g : grids) {
        const InverseIndex index = build_inverse_index(g);
        for (int k = 0; k < 20; ++k) {
            const double w = rng.uniform(0.2, 0.42);
            const double h = rng.uniform(0.2, 0.42);
            const double x = rng.uniform(0.05, 0.93 - w);
            const double y = rng.uniform(0.05, 0.93 - h);
            const BBox box = make_bbox(x, y, x + w, y + h);
            const BoxTransformResult fwd = forward_box_transform(box, g, index);
            if (fwd.boundary_snapped) continue;
            const double zr_area = fwd.box.area() / box.area();
            const double m = zoom_ratio(rasterize_box_mask(box, dims), g);
            CHECK(zr_area == doctest::Approx(m).epsilon(0.10));
        }
    }
}

TEST_CASE("distortion_stats") {
    SUBCASE("identity grid: det 1, variance 0") {
        const DistortionStats s = distortion_stats(
            make_uniform_grid({17, 17}), {make_bbox(0.2, 0.2, 0.6, 0.6)});
        CHECK(s.mean_in == doctest::Approx(1.0));
        CHECK(s.mean_out == doctest::Approx(1.0));
        CHECK(s.var_in == doctest::Approx(0.0));
        CHECK(s.var_out == doctest::Approx(0.0));
        CHECK(s.count_in > 0);
        CHECK(s.count_out > 0);
    }
    SUBCASE("linear x2 zoom: in-box det 0.25 with zero variance") {
        const DistortionStats s = distortion_stats(
            central_zoom_grid({33, 33}), {make_bbox(0.3, 0.3, 0.7, 0.7)});
        CHECK(s.mean_in == doctest::Approx(0.25));
        CHECK(s.var_in == doctest::Approx(0.0));
    }
    SUBCASE("saliency spike distorts more than the offset solver (report)") {
        const GridDims dims{49, 49};
        const std::vector<BBox> boxes{make_bbox(0.42, 0.42, 0.58, 0.58)};
        RunConfig cfg;
        cfg.process_dims = dims;
        cfg.offset_scale = 0.25;
        cfg.solver.steps = 80;
        const GridBuild offset_build = build_scene_grid(boxes, cfg, 1);
        cfg.parametrization = Parametrization::saliency;
        cfg.saliency.blur_sigma = 0.01; // sharp spike
        cfg.saliency.kernel_sigma = 0.25;
        const GridBuild saliency_build = build_scene_grid(boxes, cfg, 1);
        const DistortionStats ds_offset =
            distortion_stats(offset_build.grid, boxes);
        const DistortionStats ds_saliency =
            distortion_stats(saliency_build.grid, boxes);
        MESSAGE("in-box det variance, offset parametrization: ",
                ds_offset.var_in, ", saliency parametrization: ",
                ds_saliency.var_in);
        CHECK(ds_saliency.count_in > 0);
    }
}

TEST_CASE("scene reports") {
    SceneReport report;
    report.scene_id = "scene_000007";
    report.out_dims = {64, 64};
    const SizeClassConfig classes = reference_640();

    SUBCASE("empty scene emits and parses with no aggregates") {
        recompute_aggregates(report, classes);
        CHECK(!report.mean_iou.has_value());
        const SceneReport back = parse_report(emit_report(report));
        CHECK(back == report);
    }
    SUBCASE("single box: aggregates equal that box") {
        BoxRecord r;
        r.category = 2;
        r.original = make_bbox(0.1, 0.1, 0.2, 0.25);
        r.zoomed = make_bbox(0.08, 0.09, 0.28, 0.4, BoxSpace::zoomed);
        r.zoom_ratio = 2.31;
        r.zr_area = 2.19;
        r.roundtrip_iou = 0.955;
        r.size_class = classes.classify(r.original);
        report.boxes.push_back(r);
        recompute_aggregates(report, classes);
        CHECK(*report.mean_iou == r.roundtrip_iou);
        CHECK(*report.min_iou == r.roundtrip_iou);
        const int c = static_cast<int>(r.size_class);
        CHECK(*report.zr.mean[c] == r.zr_area);
        CHECK(report.zr.count[c] == 1);
    }
    SUBCASE("parse(emit(r)) is the identity on a populated report") {
        Rng rng(5);
        for (int k = 0; k < 5; ++k) {
            BoxRecord r;
            r.category = k;
            const double x = rng.uniform(0.05, 0.5);
            const double y = rng.uniform(0.05, 0.5);
            r.original = make_bbox(x, y, x + 0.2, y + 0.3);
            r.zoomed = make_bbox(x / 2, y / 2, x / 2 + 0.4, y / 2 + 0.5,
                                 BoxSpace::zoomed);
            r.zoom_ratio = rng.uniform(0.5, 4.0);
            r.zr_area = rng.uniform(0.5, 4.0);
            r.roundtrip_iou = rng.uniform(0.8, 1.0);
            r.size_class = classes.classify(r.original);
            r.boundary_snapped = k == 3;
            r.degenerate_expanded = k == 4;
            report.boxes.push_back(r);
        }
        report.distortion = {0.8, 0.01, 1.1, 0.02, 120, 4100 - 120};
        report.trace = {1.9, 0.02, 2.4, 137};
        recompute_aggregates(report, classes);
        const std::string text = emit_report(report);
        const SceneReport back = parse_report(text);
        CHECK(back == report);
        CHECK(emit_report(back) == text);
    }
}
