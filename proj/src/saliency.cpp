// Copyright (c) 2026 The nuzoom Authors.
// Licensed under the Apache License, Version 2.0.

#include "nuzoom/saliency.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nuzoom {

void GaussianKernelConfig::validate() const {
    if (!(sigma > 0.0))
        throw std::invalid_argument("GaussianKernelConfig: sigma must be > 0");
    if (radius < 1)
        throw std::invalid_argument("GaussianKernelConfig: radius must be >= 1");
}

SamplingGrid saliency_grid(const SaliencyMap& sal,
                           const GaussianKernelConfig& cfg, GridDims out) {
    cfg.validate();
    if (!sal.dims().valid() || !out.valid())
        throw std::invalid_argument("saliency_grid: dims must be >= 2x2");
    const GridDims sd = sal.dims();
    bool any_positive = false;
    for (double v : sal.values.data()) {
        if (v < 0.0)
            throw std::invalid_argument("saliency_grid: negative saliency");
        if (v > 0.0) any_positive = true;
    }
    if (!any_positive)
        throw std::invalid_argument("saliency_grid: all-zero saliency map");

    const double inv_two_sigma2 = 1.0 / (2.0 * cfg.sigma * cfg.sigma);
    SamplingGrid grid{ScalarField(out), ScalarField(out)};
    for (int oi = 0; oi < out.height; ++oi) {
        const double y = static_cast<double>(oi) / (out.height - 1);
        const double pr = y * (sd.height - 1);
        const int i0 = std::max(0, static_cast<int>(std::ceil(pr - cfg.radius)));
        const int i1 = std::min(sd.height - 1,
                                static_cast<int>(std::floor(pr + cfg.radius)));
        for (int oj = 0; oj < out.width; ++oj) {
            const double x = static_cast<double>(oj) / (out.width - 1);
            const double pc = x * (sd.width - 1);
            const int j0 =
                std::max(0, static_cast<int>(std::ceil(pc - cfg.radius)));
            const int j1 = std::min(
                sd.width - 1, static_cast<int>(std::floor(pc + cfg.radius)));

            double wsum = 0.0, usum = 0.0, vsum = 0.0;
            for (int i = i0; i <= i1; ++i) {
                const double yp = static_cast<double>(i) / (sd.height - 1);
                const double dy = y - yp;
                for (int j = j0; j <= j1; ++j) {
                    const double s = sal.values(i, j);
                    if (s == 0.0) continue;
                    const double xp = static_cast<double>(j) / (sd.width - 1);
                    const double dx = x - xp;
                    const double w =
                        s * std::exp(-(dx * dx + dy * dy) * inv_two_sigma2);
                    wsum += w;
                    usum += w * xp;
                    vsum += w * yp;
                }
            }
            if (wsum > 0.0) {
                grid.u(oi, oj) = std::clamp(usum / wsum, 0.0, 1.0);
                grid.v(oi, oj) = std::clamp(vsum / wsum, 0.0, 1.0);
            } else {
                // No saliency inside the truncated window: keep the node
                // where the uniform grid would put it.
                grid.u(oi, oj) = x;
                grid.v(oi, oj) = y;
            }
        }
    }
    return grid;
}

} // namespace nuzoom
