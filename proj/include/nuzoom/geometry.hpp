// Copyright (c) 2026 The nuzoom Authors.
// Licensed under the Apache License, Version 2.0.

#ifndef NUZOOM_GEOMETRY_HPP
#define NUZOOM_GEOMETRY_HPP

#include <cstddef>
#include <vector>

namespace nuzoom {

/// Normalized image coordinate: x along the width axis, y along the height
/// axis, both in [0,1] under the align-corners convention (0 = first pixel
/// center, 1 = last pixel center).
struct NormCoord {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const NormCoord&, const NormCoord&) = default;
};

struct GridDims {
    int height = 0;
    int width = 0;

    bool valid() const { return height >= 2 && width >= 2; }
    long long node_count() const {
        return static_cast<long long>(height) * width;
    }
    friend bool operator==(const GridDims&, const GridDims&) = default;
};

/// Row-major height x width field of doubles.
class ScalarField {
public:
    ScalarField() = default;
    ScalarField(GridDims dims, double fill = 0.0);

    GridDims dims() const { return dims_; }
    int height() const { return dims_.height; }
    int width() const { return dims_.width; }

    double operator()(int row, int col) const {
        return data_[static_cast<size_t>(row) * dims_.width + col];
    }
    double& operator()(int row, int col) {
        return data_[static_cast<size_t>(row) * dims_.width + col];
    }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    double sum() const;
    bool all_finite() const;

    friend bool operator==(const ScalarField&, const ScalarField&) = default;

private:
    GridDims dims_{};
    std::vector<double> data_;
};

/// Sampling positions within kNodeSnapEps pixels of an exact node are
/// treated as on-node, so grids whose coordinates were produced by the
/// inverse arithmetic (j/(n-1) then *(n-1)) resample node values exactly.
inline constexpr double kNodeSnapEps = 1e-9;

/// Interpolate `f` at a fractional (row, col) pixel position. Positions are
/// clamped to the field extent (border replication).
double bilinear_at(const ScalarField& f, double row, double col);

/// Low-resolution displacement field: dx in normalized-width units, dy in
/// normalized-height units, one value per grid node.
struct OffsetField {
    ScalarField dx;
    ScalarField dy;

    GridDims dims() const { return dx.dims(); }
    friend bool operator==(const OffsetField&, const OffsetField&) = default;
};

OffsetField zero_offsets(GridDims dims);

/// Per-output-node original-space coordinates (u, v): evaluating the input
/// image at these coordinates produces the zoomed image.
struct SamplingGrid {
    ScalarField u;
    ScalarField v;

    GridDims dims() const { return u.dims(); }
    friend bool operator==(const SamplingGrid&, const SamplingGrid&) = default;
};

/// Identity mapping: node (i,j) holds u = j/(width-1), v = i/(height-1).
SamplingGrid make_uniform_grid(GridDims dims);

/// Align-corners bilinear resampling of dx and dy onto `target`. Exact on
/// fields that are bilinear in the node coordinates; preserves values at
/// coinciding nodes.
OffsetField upsample_offsets(const OffsetField& field, GridDims target);

/// u' = u + dx, v' = v + dy per node. With `clamp` the resulting
/// coordinates are clamped to [0,1].
SamplingGrid apply_offsets(const SamplingGrid& base, const OffsetField& offsets,
                           bool clamp);

} // namespace nuzoom

#endif // NUZOOM_GEOMETRY_HPP
