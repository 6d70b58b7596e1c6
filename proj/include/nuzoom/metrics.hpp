// Copyright (c) 2026 The nuzoom Authors.
// Licensed under the Apache License, Version 2.0.

#ifndef NUZOOM_METRICS_HPP
#define NUZOOM_METRICS_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "nuzoom/bbox.hpp"
#include "nuzoom/box_transform.hpp"
#include "nuzoom/geometry.hpp"

namespace nuzoom {

enum class SizeClass { small = 0, medium = 1, large = 2 };

const char* size_class_name(SizeClass c);

/// Pixel-area thresholds at a reference resolution: small < 32^2,
/// medium < 96^2, large otherwise, the usual detection convention.
struct SizeClassConfig {
    double small_max_area = 32.0 * 32.0;
    double medium_max_area = 96.0 * 96.0;
    GridDims reference{640, 640};

    void validate() const;
    SizeClass classify(const BBox& box) const;
};

/// Per-class mean of transformed-box-area / original-box-area. Classes with
/// no boxes are absent; boundary-snapped boxes are excluded from the means
/// and counted separately.
struct ZrReport {
    std::array<std::optional<double>, 3> mean; // indexed by SizeClass
    std::array<int, 3> count{0, 0, 0};
    int snapped_excluded = 0;

    friend bool operator==(const ZrReport&, const ZrReport&) = default;
};

ZrReport compute_zr(const std::vector<BBox>& boxes, const SamplingGrid& grid,
                    const InverseIndex& index, const SizeClassConfig& classes);

/// Jacobian-determinant statistics over nodes inside vs outside the union
/// of the rasterized boxes (a node is inside when its coverage is >= 1/2).
struct DistortionStats {
    double mean_in = 0.0, var_in = 0.0;
    double mean_out = 0.0, var_out = 0.0;
    int count_in = 0, count_out = 0;

    friend bool operator==(const DistortionStats&, const DistortionStats&) =
        default;
};

DistortionStats distortion_stats(const SamplingGrid& grid,
                                 const std::vector<BBox>& boxes);

struct BoxRecord {
    int category = 0;
    BBox original;            // normalized, original space
    BBox zoomed;              // normalized, zoomed space
    double zoom_ratio = 0.0;  // mask-mass ratio m (the optimization quantity)
    double zr_area = 0.0;     // transformed-box-area ratio (the metric)
    double roundtrip_iou = 0.0;
    SizeClass size_class = SizeClass::small;
    bool boundary_snapped = false;
    bool degenerate_expanded = false;

    friend bool operator==(const BoxRecord&, const BoxRecord&) = default;
};

struct LossTraceSummary {
    double initial_loss = 0.0;
    double final_loss = 0.0;
    double final_mean_ratio = 0.0;
    int steps = 0;

    friend bool operator==(const LossTraceSummary&, const LossTraceSummary&) =
        default;
};

struct SceneReport {
    std::string scene_id;
    GridDims out_dims;
    std::vector<BoxRecord> boxes;
    ZrReport zr;
    std::optional<double> mean_iou;
    std::optional<double> min_iou;
    DistortionStats distortion;
    LossTraceSummary trace;

    friend bool operator==(const SceneReport&, const SceneReport&) = default;
};

/// Deterministic JSON serialization with stable field ordering.
std::string emit_report(const SceneReport& report);
SceneReport parse_report(const std::string& text);

/// Recompute the aggregate fields (zr means, mean/min IoU) from the per-box
/// records; used to check reports stay internally consistent.
void recompute_aggregates(SceneReport& report, const SizeClassConfig& classes);

} // namespace nuzoom

#endif // NUZOOM_METRICS_HPP
