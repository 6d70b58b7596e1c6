// Copyright (c) 2026 The nuzoom Authors.
// Licensed under the Apache License, Version 2.0.

#ifndef NUZOOM_OFFSET_SOLVER_HPP
#define NUZOOM_OFFSET_SOLVER_HPP

#include <cstdint>
#include <vector>

#include "nuzoom/bbox.hpp"
#include "nuzoom/zoom_objective.hpp"

namespace nuzoom {

struct SolverConfig {
    int steps = 200;
    double learning_rate = 1e-3;
    double momentum = 0.5;
    GridDims offset_dims{16, 16}; // low-resolution grid the solver updates
    ZoomLossConfig loss_cfg;
    uint64_t seed = 0;
    double init_scale = 0.0; // stddev of the Gaussian offset init; 0 = zeros

    void validate() const;
};

struct TraceEntry {
    int iteration = 0;
    double loss = 0.0;       // total objective (zoom term + regularizer)
    double mean_ratio = 0.0; // mean zoom ratio over the boxes
};

struct SolverResult {
    OffsetField offsets; // at cfg.offset_dims
    std::vector<TraceEntry> trace;
};

/// Exact adjoint of align-corners bilinear upsampling: every full-resolution
/// entry is distributed onto its enclosing low-resolution nodes with its
/// interpolation weights.
GradField backproject_gradient(const GradField& full, GridDims low_dims);

/// Per-image momentum-SGD optimization of a low-resolution offset field
/// against the zoom objective. Deterministic for a fixed (seed, config,
/// boxes). Each step: upsample offsets, apply to the uniform grid with
/// clamping, evaluate the objective, backproject the gradient, update.
/// Stops early once the loss change over 10 steps falls below 1e-8.
/// Throws std::runtime_error when the loss turns non-finite (diverged;
/// lower the learning rate).
SolverResult optimize_offsets(const std::vector<BBox>& boxes, GridDims out_dims,
                              const SolverConfig& cfg);

} // namespace nuzoom

#endif // NUZOOM_OFFSET_SOLVER_HPP
