// Copyright (c) 2026 The nuzoom Authors.
// Licensed under the Apache License, Version 2.0.

#ifndef NUZOOM_SALIENCY_HPP
#define NUZOOM_SALIENCY_HPP

#include "nuzoom/geometry.hpp"

namespace nuzoom {

/// Non-negative importance map with at least one positive value.
struct SaliencyMap {
    ScalarField values;

    GridDims dims() const { return values.dims(); }
};

struct GaussianKernelConfig {
    double sigma = 0.1; // kernel stddev in normalized coordinate units
    int radius = 4;     // support truncation, in saliency-grid nodes

    void validate() const;
};

/// Grid coordinates as saliency-weighted, Gaussian-weighted averages of the
/// neighboring node coordinates: the pulled-grid parametrization. Each
/// output node's window is the saliency nodes within `radius` of its
/// position; windows with zero total weight fall back to the identity
/// coordinate. Result clamped to [0,1].
SamplingGrid saliency_grid(const SaliencyMap& sal,
                           const GaussianKernelConfig& cfg, GridDims out);

} // namespace nuzoom

#endif // NUZOOM_SALIENCY_HPP
