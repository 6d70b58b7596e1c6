// Copyright (c) 2026 The nuzoom Authors.
// Licensed under the Apache License, Version 2.0.

#include "nuzoom/box_transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nuzoom {

namespace {

struct Best {
    double d2 = std::numeric_limits<double>::infinity();
    int node = std::numeric_limits<int>::max();

    void consider(double d2_cand, int node_cand) {
        if (d2_cand < d2 || (d2_cand == d2 && node_cand < node)) {
            d2 = d2_cand;
            node = node_cand;
        }
    }
};

} // namespace

InverseIndex::Hit InverseIndex::make_hit(int node, double d2) const {
    Hit h;
    h.node_index = node;
    h.row = node / dims_.width;
    h.col = node % dims_.width;
    h.u = us_[node];
    h.v = vs_[node];
    h.distance = std::sqrt(d2);
    return h;
}

InverseIndex::Hit InverseIndex::query_brute_force(NormCoord q) const {
    Best best;
    const int n = static_cast<int>(us_.size());
    for (int k = 0; k < n; ++k) {
        const double du = us_[k] - q.x;
        const double dv = vs_[k] - q.y;
        best.consider(du * du + dv * dv, k);
    }
    return make_hit(best.node, best.d2);
}

InverseIndex::Hit InverseIndex::query(NormCoord q) const {
    const int B = buckets_per_axis_;
    const double side = 1.0 / B;
    auto bucket_of = [&](double c) {
        return std::clamp(static_cast<int>(c * B), 0, B - 1);
    };
    const int bx = bucket_of(q.x);
    const int by = bucket_of(q.y);

    Best best;
    // Expand Chebyshev rings until the unscanned region is provably farther
    // than the best candidate (strictly, so equal-distance ties elsewhere
    // cannot be missed).
    for (int r = 0;; ++r) {
        const int x0 = bx - r, x1 = bx + r;
        const int y0 = by - r, y1 = by + r;
        bool any_cell = false;
        for (int cy = std::max(0, y0); cy <= std::min(B - 1, y1); ++cy) {
            const bool edge_row = cy == y0 || cy == y1;
            for (int cx = std::max(0, x0); cx <= std::min(B - 1, x1); ++cx) {
                if (!edge_row && cx != x0 && cx != x1) continue; // ring only
                any_cell = true;
                const int cell = cy * B + cx;
                for (int e = bucket_start_[cell]; e < bucket_start_[cell + 1];
                     ++e) {
                    const int k = bucket_entries_[e];
                    const double du = us_[k] - q.x;
                    const double dv = vs_[k] - q.y;
                    best.consider(du * du + dv * dv, k);
                }
            }
        }
        const bool covers_all = x0 <= 0 && y0 <= 0 && x1 >= B - 1 && y1 >= B - 1;
        if (covers_all) break;
        if (best.node != std::numeric_limits<int>::max()) {
            const double margin =
                std::min(std::min(q.x - x0 * side, (x1 + 1) * side - q.x),
                         std::min(q.y - y0 * side, (y1 + 1) * side - q.y));
            if (margin > 0.0 && margin * margin > best.d2) break;
        }
        (void)any_cell;
    }
    return make_hit(best.node, best.d2);
}

InverseIndex build_inverse_index(const SamplingGrid& grid) {
    if (!grid.dims().valid())
        throw std::invalid_argument("build_inverse_index: grid must be >= 2x2");
    InverseIndex idx;
    idx.dims_ = grid.dims();
    const int n = static_cast<int>(idx.dims_.node_count());
    idx.us_.resize(n);
    idx.vs_.resize(n);
    for (int i = 0; i < idx.dims_.height; ++i)
        for (int j = 0; j < idx.dims_.width; ++j) {
            const int k = i * idx.dims_.width + j;
            idx.us_[k] = grid.u(i, j);
            idx.vs_[k] = grid.v(i, j);
        }

    // ~1 point per bucket on a uniform spread.
    idx.buckets_per_axis_ = std::clamp(
        static_cast<int>(std::lround(std::sqrt(static_cast<double>(n)))), 1,
        4096);
    const int B = idx.buckets_per_axis_;
    auto bucket_of = [&](double c) {
        return std::clamp(static_cast<int>(c * B), 0, B - 1);
    };
    std::vector<int> counts(static_cast<size_t>(B) * B + 1, 0);
    std::vector<int> cell_of(n);
    for (int k = 0; k < n; ++k) {
        const int cell = bucket_of(idx.vs_[k]) * B + bucket_of(idx.us_[k]);
        cell_of[k] = cell;
        ++counts[cell + 1];
    }
    for (size_t c = 1; c < counts.size(); ++c) counts[c] += counts[c - 1];
    idx.bucket_start_ = counts;
    idx.bucket_entries_.resize(n);
    std::vector<int> cursor(idx.bucket_start_.begin(),
                            idx.bucket_start_.end() - 1);
    // Node order within a bucket stays ascending, which the tie rule needs.
    for (int k = 0; k < n; ++k) idx.bucket_entries_[cursor[cell_of[k]]++] = k;
    return idx;
}

namespace {

struct AxisSpan {
    double lo, hi;
    bool reordered = false;
    bool expanded = false;
};

AxisSpan fix_axis(double a, double b, double spacing) {
    AxisSpan s{a, b};
    if (s.lo > s.hi) {
        std::swap(s.lo, s.hi);
        s.reordered = true;
    }
    if (s.lo == s.hi) {
        s.expanded = true;
        s.lo -= spacing / 2.0;
        s.hi += spacing / 2.0;
        if (s.lo < 0.0) {
            s.lo = 0.0;
            s.hi = spacing;
        } else if (s.hi > 1.0) {
            s.hi = 1.0;
            s.lo = 1.0 - spacing;
        }
    }
    return s;
}

} // namespace

BoxTransformResult forward_box_transform(const BBox& box,
                                         const SamplingGrid& grid,
                                         const InverseIndex& index) {
    if (!box.valid())
        throw std::invalid_argument("forward_box_transform: invalid box");
    const GridDims d = grid.dims();
    const InverseIndex::Hit h1 = index.query(box.c1);
    const InverseIndex::Hit h2 = index.query(box.c2);

    const double dx = 1.0 / (d.width - 1);
    const double dy = 1.0 / (d.height - 1);
    const AxisSpan xs = fix_axis(static_cast<double>(h1.col) / (d.width - 1),
                                 static_cast<double>(h2.col) / (d.width - 1), dx);
    const AxisSpan ys =
        fix_axis(static_cast<double>(h1.row) / (d.height - 1),
                 static_cast<double>(h2.row) / (d.height - 1), dy);

    BoxTransformResult res;
    res.box = BBox{{xs.lo, ys.lo}, {xs.hi, ys.hi}, BoxSpace::zoomed};
    res.reordered = xs.reordered || ys.reordered;
    res.degenerate_expanded = xs.expanded || ys.expanded;
    res.max_corner_snap = std::max(h1.distance, h2.distance);
    res.boundary_snapped =
        res.max_corner_snap > kSnapDistanceFactor * std::max(dx, dy);
    return res;
}

BBox backward_box_transform(const BBox& box, const SamplingGrid& grid) {
    const GridDims d = grid.dims();
    auto map = [&](NormCoord c) {
        const double row = std::clamp(c.y, 0.0, 1.0) * (d.height - 1);
        const double col = std::clamp(c.x, 0.0, 1.0) * (d.width - 1);
        return NormCoord{bilinear_at(grid.u, row, col),
                         bilinear_at(grid.v, row, col)};
    };
    NormCoord p1 = map(box.c1);
    NormCoord p2 = map(box.c2);
    if (p1.x > p2.x) std::swap(p1.x, p2.x);
    if (p1.y > p2.y) std::swap(p1.y, p2.y);
    return BBox{p1, p2, BoxSpace::original};
}

double roundtrip_iou(const BBox& box, const SamplingGrid& grid,
                     const InverseIndex& index) {
    const BoxTransformResult fwd = forward_box_transform(box, grid, index);
    const BBox back = backward_box_transform(fwd.box, grid);
    return iou(box, back);
}

IouBound iou_lower_bound(double w, double h, double tau) {
    if (!(w > 0.0) || !(h > 0.0))
        throw std::invalid_argument("iou_lower_bound: w and h must be > 0");
    if (!(tau >= 0.0))
        throw std::invalid_argument("iou_lower_bound: tau must be >= 0");
    IouBound b;
    const double diag = std::sqrt(w * w + h * h);
    const double shift = tau * diag;
    const double area = w * h;
    if (shift >= area) {
        b.exact = 0.0;
        b.clamped = true;
    } else {
        b.exact = (area - shift) / (area + shift);
    }
    b.approx = 1.0 - 2.0 * tau * std::sqrt(1.0 / (w * w) + 1.0 / (h * h));
    return b;
}

} // namespace nuzoom
