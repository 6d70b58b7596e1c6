// Copyright (c) 2026 The nuzoom Authors.
// Licensed under the Apache License, Version 2.0.

#include "nuzoom/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nuzoom {

namespace {

void require_valid(GridDims dims, const char* what) {
    if (!dims.valid())
        throw std::invalid_argument(std::string(what) +
                                    ": grid dims must be at least 2x2");
}

// Interpolation stencil along one axis: for each target index, the two
// source indices and the fractional weight of the upper one.
struct AxisStencil {
    std::vector<int> lo;
    std::vector<int> hi;
    std::vector<double> frac;
};

AxisStencil make_axis_stencil(int src_n, int tgt_n) {
    AxisStencil s;
    s.lo.resize(tgt_n);
    s.hi.resize(tgt_n);
    s.frac.resize(tgt_n);
    const double scale = static_cast<double>(src_n - 1) / (tgt_n - 1);
    for (int t = 0; t < tgt_n; ++t) {
        double pos = t * scale;
        int lo = static_cast<int>(std::floor(pos));
        double f = pos - lo;
        if (std::abs(pos - std::round(pos)) < kNodeSnapEps) {
            lo = static_cast<int>(std::lround(pos));
            f = 0.0;
        }
        lo = std::clamp(lo, 0, src_n - 1);
        s.lo[t] = lo;
        s.hi[t] = std::min(lo + 1, src_n - 1);
        s.frac[t] = f;
    }
    return s;
}

ScalarField resample_bilinear(const ScalarField& src, GridDims target) {
    const AxisStencil rows = make_axis_stencil(src.height(), target.height);
    const AxisStencil cols = make_axis_stencil(src.width(), target.width);
    ScalarField out(target);
    for (int i = 0; i < target.height; ++i) {
        const double ft = rows.frac[i];
        for (int j = 0; j < target.width; ++j) {
            const double fs = cols.frac[j];
            const double a = src(rows.lo[i], cols.lo[j]);
            const double b = src(rows.lo[i], cols.hi[j]);
            const double c = src(rows.hi[i], cols.lo[j]);
            const double d = src(rows.hi[i], cols.hi[j]);
            out(i, j) = (1.0 - fs) * (1.0 - ft) * a + fs * (1.0 - ft) * b +
                        (1.0 - fs) * ft * c + fs * ft * d;
        }
    }
    return out;
}

} // namespace

ScalarField::ScalarField(GridDims dims, double fill)
    : dims_(dims),
      data_(static_cast<size_t>(dims.height) * dims.width, fill) {}

double ScalarField::sum() const {
    double s = 0.0;
    for (double v : data_) s += v;
    return s;
}

bool ScalarField::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

double bilinear_at(const ScalarField& f, double row, double col) {
    const int h = f.height();
    const int w = f.width();
    row = std::clamp(row, 0.0, static_cast<double>(h - 1));
    col = std::clamp(col, 0.0, static_cast<double>(w - 1));
    if (std::abs(row - std::round(row)) < kNodeSnapEps) row = std::round(row);
    if (std::abs(col - std::round(col)) < kNodeSnapEps) col = std::round(col);

    const int h1 = static_cast<int>(row);
    const int w1 = static_cast<int>(col);
    const int h2 = std::min(h1 + 1, h - 1);
    const int w2 = std::min(w1 + 1, w - 1);
    const double t = row - h1;
    const double s = col - w1;
    return (1.0 - s) * (1.0 - t) * f(h1, w1) + s * (1.0 - t) * f(h1, w2) +
           (1.0 - s) * t * f(h2, w1) + s * t * f(h2, w2);
}

OffsetField zero_offsets(GridDims dims) {
    require_valid(dims, "zero_offsets");
    return {ScalarField(dims, 0.0), ScalarField(dims, 0.0)};
}

SamplingGrid make_uniform_grid(GridDims dims) {
    require_valid(dims, "make_uniform_grid");
    SamplingGrid g{ScalarField(dims), ScalarField(dims)};
    for (int i = 0; i < dims.height; ++i) {
        const double y = static_cast<double>(i) / (dims.height - 1);
        for (int j = 0; j < dims.width; ++j) {
            g.u(i, j) = static_cast<double>(j) / (dims.width - 1);
            g.v(i, j) = y;
        }
    }
    return g;
}

OffsetField upsample_offsets(const OffsetField& field, GridDims target) {
    require_valid(field.dims(), "upsample_offsets: source");
    require_valid(target, "upsample_offsets: target");
    if (field.dims() == target) return field;
    return {resample_bilinear(field.dx, target),
            resample_bilinear(field.dy, target)};
}

SamplingGrid apply_offsets(const SamplingGrid& base, const OffsetField& offsets,
                           bool clamp) {
    require_valid(base.dims(), "apply_offsets");
    if (!(offsets.dims() == base.dims()))
        throw std::invalid_argument(
            "apply_offsets: offset dims must match grid dims "
            "(upsample_offsets first)");
    SamplingGrid out = base;
    const GridDims d = base.dims();
    for (int i = 0; i < d.height; ++i) {
        for (int j = 0; j < d.width; ++j) {
            double u = base.u(i, j) + offsets.dx(i, j);
            double v = base.v(i, j) + offsets.dy(i, j);
            if (clamp) {
                u = std::clamp(u, 0.0, 1.0);
                v = std::clamp(v, 0.0, 1.0);
            }
            out.u(i, j) = u;
            out.v(i, j) = v;
        }
    }
    return out;
}

} // namespace nuzoom
