// Copyright (c) 2026 The nuzoom Authors.
// Licensed under the Apache License, Version 2.0.

#include "nuzoom/offset_solver.hpp"

#include <cmath>
#include <stdexcept>

#include "nuzoom/rng.hpp"

namespace nuzoom {

void SolverConfig::validate() const {
    if (steps < 1)
        throw std::invalid_argument("SolverConfig: steps must be >= 1");
    if (!(learning_rate > 0.0))
        throw std::invalid_argument("SolverConfig: learning_rate must be > 0");
    if (!(momentum >= 0.0 && momentum < 1.0))
        throw std::invalid_argument("SolverConfig: momentum must be in [0,1)");
    if (!offset_dims.valid())
        throw std::invalid_argument("SolverConfig: offset_dims must be >= 2x2");
    if (!(init_scale >= 0.0))
        throw std::invalid_argument("SolverConfig: init_scale must be >= 0");
    loss_cfg.validate();
}

GradField backproject_gradient(const GradField& full, GridDims low_dims) {
    if (!full.dims().valid() || !low_dims.valid())
        throw std::invalid_argument("backproject_gradient: dims must be >= 2x2");
    if (low_dims.height > full.dims().height ||
        low_dims.width > full.dims().width)
        throw std::invalid_argument(
            "backproject_gradient: low dims exceed full dims");

    const GridDims fd = full.dims();
    GradField low{ScalarField(low_dims), ScalarField(low_dims)};
    const double row_scale =
        static_cast<double>(low_dims.height - 1) / (fd.height - 1);
    const double col_scale =
        static_cast<double>(low_dims.width - 1) / (fd.width - 1);
    for (int i = 0; i < fd.height; ++i) {
        double rp = i * row_scale;
        if (std::abs(rp - std::round(rp)) < kNodeSnapEps) rp = std::round(rp);
        const int r0 = static_cast<int>(rp);
        const int r1 = std::min(r0 + 1, low_dims.height - 1);
        const double fr = rp - r0;
        for (int j = 0; j < fd.width; ++j) {
            double cp = j * col_scale;
            if (std::abs(cp - std::round(cp)) < kNodeSnapEps)
                cp = std::round(cp);
            const int c0 = static_cast<int>(cp);
            const int c1 = std::min(c0 + 1, low_dims.width - 1);
            const double fc = cp - c0;
            const double gx = full.d_dx(i, j);
            const double gy = full.d_dy(i, j);
            low.d_dx(r0, c0) += (1.0 - fr) * (1.0 - fc) * gx;
            low.d_dx(r0, c1) += (1.0 - fr) * fc * gx;
            low.d_dx(r1, c0) += fr * (1.0 - fc) * gx;
            low.d_dx(r1, c1) += fr * fc * gx;
            low.d_dy(r0, c0) += (1.0 - fr) * (1.0 - fc) * gy;
            low.d_dy(r0, c1) += (1.0 - fr) * fc * gy;
            low.d_dy(r1, c0) += fr * (1.0 - fc) * gy;
            low.d_dy(r1, c1) += fr * fc * gy;
        }
    }
    return low;
}

SolverResult optimize_offsets(const std::vector<BBox>& boxes, GridDims out_dims,
                              const SolverConfig& cfg) {
    cfg.validate();
    if (boxes.empty())
        throw std::invalid_argument("optimize_offsets: no boxes to zoom");
    if (!out_dims.valid())
        throw std::invalid_argument("optimize_offsets: out_dims must be >= 2x2");
    if (cfg.offset_dims.height > out_dims.height ||
        cfg.offset_dims.width > out_dims.width)
        throw std::invalid_argument(
            "optimize_offsets: offset grid exceeds output dims");

    const SamplingGrid base = make_uniform_grid(out_dims);
    OffsetField field = zero_offsets(cfg.offset_dims);
    if (cfg.init_scale > 0.0) {
        Rng rng(cfg.seed);
        for (double& v : field.dx.data()) v = cfg.init_scale * rng.normal();
        for (double& v : field.dy.data()) v = cfg.init_scale * rng.normal();
    }

    OffsetField velocity = zero_offsets(cfg.offset_dims);
    SolverResult result;
    result.trace.reserve(cfg.steps + 1);

    // The last trace entry always describes the returned field.
    for (int step = 0;; ++step) {
        const OffsetField full = upsample_offsets(field, out_dims);
        const ZoomObjectiveEval eval =
            evaluate_zoom_objective(boxes, base, full, cfg.loss_cfg);
        if (!std::isfinite(eval.total))
            throw std::runtime_error(
                "optimize_offsets: loss diverged; reduce the learning rate");

        double mean_ratio = 0.0;
        for (double m : eval.ratios) mean_ratio += m;
        mean_ratio /= static_cast<double>(eval.ratios.size());
        result.trace.push_back({step, eval.total, mean_ratio});

        if (step >= cfg.steps) break;
        const size_t t = result.trace.size();
        if (t >= 11 && std::abs(result.trace[t - 11].loss -
                                result.trace[t - 1].loss) < 1e-8)
            break;

        const GradField low = backproject_gradient(eval.grad, cfg.offset_dims);
        const size_t n = field.dx.data().size();
        for (size_t k = 0; k < n; ++k) {
            velocity.dx.data()[k] = cfg.momentum * velocity.dx.data()[k] -
                                    cfg.learning_rate * low.d_dx.data()[k];
            velocity.dy.data()[k] = cfg.momentum * velocity.dy.data()[k] -
                                    cfg.learning_rate * low.d_dy.data()[k];
            field.dx.data()[k] += velocity.dx.data()[k];
            field.dy.data()[k] += velocity.dy.data()[k];
        }
    }

    result.offsets = std::move(field);
    return result;
}

} // namespace nuzoom
