// Copyright (c) 2026 The nuzoom Authors.
// Licensed under the Apache License, Version 2.0.

#include "nuzoom/warp.hpp"

#include <cmath>
#include <stdexcept>

namespace nuzoom {

Image make_image(GridDims dims, int channels, double fill) {
    if (!dims.valid())
        throw std::invalid_argument("make_image: dims must be at least 2x2");
    if (channels < 1)
        throw std::invalid_argument("make_image: need at least one channel");
    Image img;
    img.channels.assign(channels, ScalarField(dims, fill));
    return img;
}

double bilinear_sample(const Image& image, NormCoord at, int channel) {
    if (channel < 0 || channel >= image.channel_count())
        throw std::invalid_argument("bilinear_sample: channel out of range");
    const ScalarField& f = image.channels[channel];
    const GridDims d = f.dims();
    if (!std::isfinite(at.x) || !std::isfinite(at.y))
        throw std::invalid_argument("bilinear_sample: non-finite coordinate");
    return bilinear_at(f, at.y * (d.height - 1), at.x * (d.width - 1));
}

Image warp_image(const Image& image, const SamplingGrid& grid) {
    if (image.channel_count() < 1)
        throw std::invalid_argument("warp_image: empty image");
    if (!image.dims().valid() || !grid.dims().valid())
        throw std::invalid_argument("warp_image: dims must be at least 2x2");
    const GridDims out = grid.dims();
    const GridDims src = image.dims();
    Image result = make_image(out, image.channel_count());
    for (int c = 0; c < image.channel_count(); ++c) {
        const ScalarField& ch = image.channels[c];
        ScalarField& dst = result.channels[c];
        for (int i = 0; i < out.height; ++i)
            for (int j = 0; j < out.width; ++j)
                dst(i, j) = bilinear_at(ch, grid.v(i, j) * (src.height - 1),
                                        grid.u(i, j) * (src.width - 1));
    }
    return result;
}

namespace {

// d(field)/d(axis coordinate) with the axis normalized to [0,1]:
// central interior, one-sided at the borders.
void differentiate(const ScalarField& f, ScalarField& d_dx, ScalarField& d_dy) {
    const int h = f.height();
    const int w = f.width();
    const double sx = w - 1;
    const double sy = h - 1;
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) {
            if (j == 0)
                d_dx(i, j) = (f(i, 1) - f(i, 0)) * sx;
            else if (j == w - 1)
                d_dx(i, j) = (f(i, w - 1) - f(i, w - 2)) * sx;
            else
                d_dx(i, j) = (f(i, j + 1) - f(i, j - 1)) * sx * 0.5;

            if (i == 0)
                d_dy(i, j) = (f(1, j) - f(0, j)) * sy;
            else if (i == h - 1)
                d_dy(i, j) = (f(h - 1, j) - f(h - 2, j)) * sy;
            else
                d_dy(i, j) = (f(i + 1, j) - f(i - 1, j)) * sy * 0.5;
        }
    }
}

} // namespace

ScalarField JacobianField::determinant() const {
    ScalarField det(du_dx.dims());
    for (int i = 0; i < det.height(); ++i)
        for (int j = 0; j < det.width(); ++j)
            det(i, j) = du_dx(i, j) * dv_dy(i, j) - du_dy(i, j) * dv_dx(i, j);
    return det;
}

JacobianField jacobian_field(const SamplingGrid& grid) {
    const GridDims d = grid.dims();
    if (!d.valid())
        throw std::invalid_argument("jacobian_field: grid must be at least 2x2");
    JacobianField jac{ScalarField(d), ScalarField(d), ScalarField(d),
                      ScalarField(d)};
    differentiate(grid.u, jac.du_dx, jac.du_dy);
    differentiate(grid.v, jac.dv_dx, jac.dv_dy);
    return jac;
}

} // namespace nuzoom
