// Copyright (c) 2026 The nuzoom Authors.
// Licensed under the Apache License, Version 2.0.

#include "nuzoom/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "nuzoom/warp.hpp"
#include "nuzoom/zoom_objective.hpp"

namespace nuzoom {

using ordered_json = nlohmann::ordered_json;

const char* size_class_name(SizeClass c) {
    switch (c) {
    case SizeClass::small: return "small";
    case SizeClass::medium: return "medium";
    case SizeClass::large: return "large";
    }
    return "?";
}

void SizeClassConfig::validate() const {
    if (!(small_max_area > 0.0) || !(medium_max_area > small_max_area))
        throw std::invalid_argument(
            "SizeClassConfig: thresholds must be strictly increasing");
    if (!reference.valid())
        throw std::invalid_argument("SizeClassConfig: bad reference dims");
}

SizeClass SizeClassConfig::classify(const BBox& box) const {
    const double area_px =
        box.width() * reference.width * box.height() * reference.height;
    if (area_px < small_max_area) return SizeClass::small;
    if (area_px < medium_max_area) return SizeClass::medium;
    return SizeClass::large;
}

ZrReport compute_zr(const std::vector<BBox>& boxes, const SamplingGrid& grid,
                    const InverseIndex& index, const SizeClassConfig& classes) {
    classes.validate();
    ZrReport report;
    std::array<double, 3> sums{0.0, 0.0, 0.0};
    for (const BBox& box : boxes) {
        const BoxTransformResult fwd = forward_box_transform(box, grid, index);
        if (fwd.boundary_snapped) {
            ++report.snapped_excluded;
            continue;
        }
        const int c = static_cast<int>(classes.classify(box));
        sums[c] += fwd.box.area() / box.area();
        ++report.count[c];
    }
    for (int c = 0; c < 3; ++c)
        if (report.count[c] > 0) report.mean[c] = sums[c] / report.count[c];
    return report;
}

DistortionStats distortion_stats(const SamplingGrid& grid,
                                 const std::vector<BBox>& boxes) {
    const GridDims d = grid.dims();
    ScalarField inside(d, 0.0);
    for (const BBox& box : boxes) {
        const BoxMask mask = rasterize_box_mask(box, d);
        for (int i = 0; i < d.height; ++i)
            for (int j = 0; j < d.width; ++j)
                inside(i, j) = std::max(inside(i, j), mask.values(i, j));
    }
    const ScalarField det = jacobian_field(grid).determinant();

    DistortionStats stats;
    double sum_in = 0.0, sum_out = 0.0, sq_in = 0.0, sq_out = 0.0;
    for (int i = 0; i < d.height; ++i) {
        for (int j = 0; j < d.width; ++j) {
            const double v = det(i, j);
            if (inside(i, j) >= 0.5) {
                ++stats.count_in;
                sum_in += v;
                sq_in += v * v;
            } else {
                ++stats.count_out;
                sum_out += v;
                sq_out += v * v;
            }
        }
    }
    if (stats.count_in > 0) {
        stats.mean_in = sum_in / stats.count_in;
        stats.var_in = sq_in / stats.count_in - stats.mean_in * stats.mean_in;
    }
    if (stats.count_out > 0) {
        stats.mean_out = sum_out / stats.count_out;
        stats.var_out =
            sq_out / stats.count_out - stats.mean_out * stats.mean_out;
    }
    return stats;
}

void recompute_aggregates(SceneReport& report, const SizeClassConfig& classes) {
    ZrReport zr;
    std::array<double, 3> sums{0.0, 0.0, 0.0};
    double iou_sum = 0.0;
    std::optional<double> iou_min;
    int iou_count = 0;
    for (const BoxRecord& r : report.boxes) {
        if (r.boundary_snapped) {
            ++zr.snapped_excluded;
        } else {
            const int c = static_cast<int>(classes.classify(r.original));
            sums[c] += r.zr_area;
            ++zr.count[c];
        }
        iou_sum += r.roundtrip_iou;
        ++iou_count;
        if (!iou_min || r.roundtrip_iou < *iou_min) iou_min = r.roundtrip_iou;
    }
    for (int c = 0; c < 3; ++c)
        if (zr.count[c] > 0) zr.mean[c] = sums[c] / zr.count[c];
    report.zr = zr;
    report.mean_iou =
        iou_count > 0 ? std::optional<double>(iou_sum / iou_count)
                      : std::nullopt;
    report.min_iou = iou_min;
}

namespace {

ordered_json bbox_to_json(const BBox& b) {
    return ordered_json{{"x1", b.c1.x},
                        {"y1", b.c1.y},
                        {"x2", b.c2.x},
                        {"y2", b.c2.y},
                        {"space", b.space == BoxSpace::original ? "original"
                                                                : "zoomed"}};
}

BBox bbox_from_json(const ordered_json& j) {
    BBox b;
    b.c1 = {j.at("x1").get<double>(), j.at("y1").get<double>()};
    b.c2 = {j.at("x2").get<double>(), j.at("y2").get<double>()};
    b.space = j.at("space").get<std::string>() == "zoomed" ? BoxSpace::zoomed
                                                           : BoxSpace::original;
    return b;
}

SizeClass size_class_from_name(const std::string& name) {
    if (name == "small") return SizeClass::small;
    if (name == "medium") return SizeClass::medium;
    if (name == "large") return SizeClass::large;
    throw std::runtime_error("parse_report: unknown size class '" + name + "'");
}

} // namespace

std::string emit_report(const SceneReport& report) {
    ordered_json j;
    j["scene_id"] = report.scene_id;
    j["out_dims"] = {{"height", report.out_dims.height},
                     {"width", report.out_dims.width}};
    ordered_json boxes = ordered_json::array();
    for (const BoxRecord& r : report.boxes) {
        ordered_json b;
        b["category"] = r.category;
        b["original"] = bbox_to_json(r.original);
        b["zoomed"] = bbox_to_json(r.zoomed);
        b["zoom_ratio"] = r.zoom_ratio;
        b["zr_area"] = r.zr_area;
        b["roundtrip_iou"] = r.roundtrip_iou;
        b["size_class"] = size_class_name(r.size_class);
        b["boundary_snapped"] = r.boundary_snapped;
        b["degenerate_expanded"] = r.degenerate_expanded;
        boxes.push_back(std::move(b));
    }
    j["boxes"] = std::move(boxes);

    ordered_json zr;
    for (int c = 0; c < 3; ++c) {
        const char* name = size_class_name(static_cast<SizeClass>(c));
        ordered_json entry;
        entry["count"] = report.zr.count[c];
        if (report.zr.mean[c]) entry["mean"] = *report.zr.mean[c];
        zr[name] = std::move(entry);
    }
    zr["snapped_excluded"] = report.zr.snapped_excluded;
    j["zr"] = std::move(zr);

    if (report.mean_iou) j["mean_iou"] = *report.mean_iou;
    if (report.min_iou) j["min_iou"] = *report.min_iou;

    j["distortion"] = {{"mean_in", report.distortion.mean_in},
                       {"var_in", report.distortion.var_in},
                       {"mean_out", report.distortion.mean_out},
                       {"var_out", report.distortion.var_out},
                       {"count_in", report.distortion.count_in},
                       {"count_out", report.distortion.count_out}};
    j["trace"] = {{"initial_loss", report.trace.initial_loss},
                  {"final_loss", report.trace.final_loss},
                  {"final_mean_ratio", report.trace.final_mean_ratio},
                  {"steps", report.trace.steps}};
    return j.dump(2) + "\n";
}

SceneReport parse_report(const std::string& text) {
    const ordered_json j = ordered_json::parse(text);
    SceneReport report;
    report.scene_id = j.at("scene_id").get<std::string>();
    report.out_dims = {j.at("out_dims").at("height").get<int>(),
                       j.at("out_dims").at("width").get<int>()};
    for (const ordered_json& b : j.at("boxes")) {
        BoxRecord r;
        r.category = b.at("category").get<int>();
        r.original = bbox_from_json(b.at("original"));
        r.zoomed = bbox_from_json(b.at("zoomed"));
        r.zoom_ratio = b.at("zoom_ratio").get<double>();
        r.zr_area = b.at("zr_area").get<double>();
        r.roundtrip_iou = b.at("roundtrip_iou").get<double>();
        r.size_class = size_class_from_name(b.at("size_class"));
        r.boundary_snapped = b.at("boundary_snapped").get<bool>();
        r.degenerate_expanded = b.at("degenerate_expanded").get<bool>();
        report.boxes.push_back(r);
    }
    const ordered_json& zr = j.at("zr");
    for (int c = 0; c < 3; ++c) {
        const ordered_json& entry =
            zr.at(size_class_name(static_cast<SizeClass>(c)));
        report.zr.count[c] = entry.at("count").get<int>();
        if (entry.contains("mean"))
            report.zr.mean[c] = entry.at("mean").get<double>();
    }
    report.zr.snapped_excluded = zr.at("snapped_excluded").get<int>();
    if (j.contains("mean_iou")) report.mean_iou = j.at("mean_iou").get<double>();
    if (j.contains("min_iou")) report.min_iou = j.at("min_iou").get<double>();
    const ordered_json& dist = j.at("distortion");
    report.distortion.mean_in = dist.at("mean_in").get<double>();
    report.distortion.var_in = dist.at("var_in").get<double>();
    report.distortion.mean_out = dist.at("mean_out").get<double>();
    report.distortion.var_out = dist.at("var_out").get<double>();
    report.distortion.count_in = dist.at("count_in").get<int>();
    report.distortion.count_out = dist.at("count_out").get<int>();
    const ordered_json& trace = j.at("trace");
    report.trace.initial_loss = trace.at("initial_loss").get<double>();
    report.trace.final_loss = trace.at("final_loss").get<double>();
    report.trace.final_mean_ratio = trace.at("final_mean_ratio").get<double>();
    report.trace.steps = trace.at("steps").get<int>();
    return report;
}

} // namespace nuzoom
