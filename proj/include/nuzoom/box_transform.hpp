// Copyright (c) 2026 The nuzoom Authors.
// Licensed under the Apache License, Version 2.0.

#ifndef NUZOOM_BOX_TRANSFORM_HPP
#define NUZOOM_BOX_TRANSFORM_HPP

#include <cstdint>
#include <vector>

#include "nuzoom/bbox.hpp"
#include "nuzoom/geometry.hpp"

namespace nuzoom {

/// Inverted lookup table of a sampling grid: every output node's mapped
/// original-space point (u,v), bucketed over [0,1]^2 for nearest-neighbor
/// queries. Queries return exactly what an exhaustive scan would, with ties
/// broken toward the lowest row-major node index. Immutable after build;
/// concurrent queries are safe.
class InverseIndex {
public:
    struct Hit {
        int node_index = 0; // row-major index into the grid
        int row = 0;
        int col = 0;
        double u = 0.0;     // the matched point
        double v = 0.0;
        double distance = 0.0;
    };

    GridDims grid_dims() const { return dims_; }

    Hit query(NormCoord q) const;

    /// Reference scan over all points with the same tie rule.
    Hit query_brute_force(NormCoord q) const;

private:
    friend InverseIndex build_inverse_index(const SamplingGrid& grid);

    GridDims dims_{};
    std::vector<double> us_, vs_;       // per node, row-major
    int buckets_per_axis_ = 1;
    std::vector<int> bucket_start_;     // CSR layout over bucket cells
    std::vector<int> bucket_entries_;   // node indices sorted by bucket

    Hit make_hit(int node, double d2) const;
};

InverseIndex build_inverse_index(const SamplingGrid& grid);

/// Forward corner-aligned transform into the zoomed space: each corner is
/// replaced by the output-space position of its nearest mapped point.
/// Corners are reordered per axis if the mapping crossed them; axes that
/// still collapse to zero extent are expanded by one node spacing.
struct BoxTransformResult {
    BBox box;
    bool reordered = false;
    bool degenerate_expanded = false;
    /// Set when a corner's nearest sample is farther than
    /// kSnapDistanceFactor node spacings: the grid never samples near it.
    bool boundary_snapped = false;
    double max_corner_snap = 0.0; // NN distance actually incurred, original space
};

inline constexpr double kSnapDistanceFactor = 4.0;

BoxTransformResult forward_box_transform(const BBox& box,
                                         const SamplingGrid& grid,
                                         const InverseIndex& index);

/// Backward transform into the original space: bilinear interpolation of
/// the grid's (u,v) fields at the corner positions.
BBox backward_box_transform(const BBox& box, const SamplingGrid& grid);

/// IoU between a box and its forward-then-backward roundtrip.
double roundtrip_iou(const BBox& box, const SamplingGrid& grid,
                     const InverseIndex& index);

/// Worst-case IoU bounds for a w x h box whose corners are displaced by at
/// most tau along a common direction.
///   exact  = (wh - tau*sqrt(w^2+h^2)) / (wh + tau*sqrt(w^2+h^2))
///   approx = 1 - 2*tau*sqrt(1/w^2 + 1/h^2)   (tau << w, h)
struct IouBound {
    double exact = 1.0;
    double approx = 1.0;
    bool clamped = false; // tau too large for a positive exact bound
};

IouBound iou_lower_bound(double w, double h, double tau);

} // namespace nuzoom

#endif // NUZOOM_BOX_TRANSFORM_HPP
