// Copyright (c) 2026 The nuzoom Authors.
// Licensed under the Apache License, Version 2.0.

#ifndef NUZOOM_WARP_HPP
#define NUZOOM_WARP_HPP

#include <vector>

#include "nuzoom/geometry.hpp"

namespace nuzoom {

/// Planar multi-channel image; intensities in [0,1] for real images,
/// unconstrained for masks.
struct Image {
    std::vector<ScalarField> channels;

    GridDims dims() const {
        return channels.empty() ? GridDims{} : channels[0].dims();
    }
    int channel_count() const { return static_cast<int>(channels.size()); }

    friend bool operator==(const Image&, const Image&) = default;
};

Image make_image(GridDims dims, int channels, double fill = 0.0);

/// Sample one channel at a normalized coordinate. Coordinates outside [0,1]
/// are clamped (border replication). Exactly reproduces node values.
double bilinear_sample(const Image& image, NormCoord at, int channel);

/// output(x,y,c) = bilinear_sample(image, (u(x,y), v(x,y)), c).
/// Output dims = grid dims.
Image warp_image(const Image& image, const SamplingGrid& grid);

/// Derivatives of the sampling map with respect to the normalized output
/// coordinates, central differences at interior nodes and one-sided at
/// borders. det < 1 means local magnification.
struct JacobianField {
    ScalarField du_dx, du_dy;
    ScalarField dv_dx, dv_dy;

    ScalarField determinant() const;
};

JacobianField jacobian_field(const SamplingGrid& grid);

} // namespace nuzoom

#endif // NUZOOM_WARP_HPP
