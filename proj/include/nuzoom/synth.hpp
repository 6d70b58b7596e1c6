// Copyright (c) 2026 The nuzoom Authors.
// Licensed under the Apache License, Version 2.0.

#ifndef NUZOOM_SYNTH_HPP
#define NUZOOM_SYNTH_HPP

#include <cstdint>
#include <vector>

#include "nuzoom/annotations.hpp"
#include "nuzoom/warp.hpp"

namespace nuzoom {

enum class SizeProfile {
    small_heavy, // sizes skewed hard toward the minimum
    mixed,       // uniform over the size range
};

struct SynthConfig {
    int count = 1;
    uint64_t seed = 0;
    GridDims canvas{640, 640}; // native pixels
    int boxes_per_scene = 4;
    double min_box_px = 16.0;
    double max_box_px = 96.0;
    SizeProfile profile = SizeProfile::small_heavy;
    double max_overlap_iou = 0.0;
    int max_placement_retries = 64;
    bool make_images = true;

    void validate() const;
};

struct SynthScene {
    Scene scene;          // image_path unset; caller decides where to write
    Image image;          // empty when make_images is off
    bool placement_truncated = false; // fewer boxes than requested
};

/// Deterministic synthetic scenes: sparse boxes placed uniformly at random
/// subject to the overlap limit, over a procedurally textured background
/// with visually distinct object patches.
std::vector<SynthScene> synth_scenes(const SynthConfig& cfg);

} // namespace nuzoom

#endif // NUZOOM_SYNTH_HPP
