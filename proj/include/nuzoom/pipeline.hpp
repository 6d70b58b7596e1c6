// Copyright (c) 2026 The nuzoom Authors.
// Licensed under the Apache License, Version 2.0.

#ifndef NUZOOM_PIPELINE_HPP
#define NUZOOM_PIPELINE_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nuzoom/annotations.hpp"
#include "nuzoom/metrics.hpp"
#include "nuzoom/offset_solver.hpp"
#include "nuzoom/saliency.hpp"

namespace nuzoom {

inline constexpr uint64_t kDefaultSeed = 20260810ULL;

enum class Parametrization { offset, saliency };

struct SaliencyOptions {
    double blur_sigma = 0.04;  // blur applied to the rasterized boxes
    double kernel_sigma = 0.1; // pull-kernel sigma (normalized units)
    int kernel_radius = 0;     // 0: derived from kernel_sigma
};

struct RunConfig {
    SolverConfig solver;
    GridDims process_dims{128, 128}; // output/zoomed resolution
    double offset_scale = 0.125;     // low-res offset grid fraction
    Parametrization parametrization = Parametrization::offset;
    SaliencyOptions saliency;
    SizeClassConfig size_classes;
    /// When unset, each scene is classified at its native resolution.
    std::optional<GridDims> size_reference_override;
    std::filesystem::path output_dir;
    uint64_t seed = kDefaultSeed;
    int jobs = 1;

    GridDims offset_dims() const;
    void validate() const;
};

enum class SceneStatus { ok, skipped, failed };

struct SceneOutcome {
    int scene_id = 0;
    SceneStatus status = SceneStatus::ok;
    std::string message;
    SceneReport report; // empty for skipped/failed scenes
};

struct RunSummary {
    std::vector<SceneOutcome> scenes; // sorted by scene id
    int ok_count = 0;
    int skipped_count = 0;
    int failed_count = 0;
};

/// Builds a sampling grid for one scene with the configured parametrization:
/// either per-image offset optimization or the saliency-pulled baseline
/// (computed from the rasterized, Gaussian-blurred boxes). Both paths
/// produce a low-resolution offset field so artifacts are uniform.
struct GridBuild {
    OffsetField offsets_low;
    SamplingGrid grid;
    LossTraceSummary trace;
};

GridBuild build_scene_grid(const std::vector<BBox>& boxes,
                           const RunConfig& cfg, uint64_t scene_seed);

/// Full batch driver: per scene optimize, warp, transform boxes, measure,
/// and write artifacts under cfg.output_dir. Scene failures are isolated.
RunSummary run_pipeline(const std::vector<Scene>& scenes, const RunConfig& cfg);

/// The run-level aggregate report (also written as run_report.json).
std::string summarize_run(const RunSummary& summary, const RunConfig& cfg);

} // namespace nuzoom

#endif // NUZOOM_PIPELINE_HPP
