// Copyright (c) 2026 The nuzoom Authors.
// Licensed under the Apache License, Version 2.0.

#ifndef NUZOOM_BBOX_HPP
#define NUZOOM_BBOX_HPP

#include "nuzoom/geometry.hpp"

namespace nuzoom {

enum class BoxSpace { original, zoomed };

/// Axis-aligned box as two corners in normalized coordinates:
/// c1 upper-left, c2 lower-right. `space` tags which coordinate system
/// the corners live in.
struct BBox {
    NormCoord c1;
    NormCoord c2;
    BoxSpace space = BoxSpace::original;

    double width() const { return c2.x - c1.x; }
    double height() const { return c2.y - c1.y; }
    double area() const { return width() * height(); }

    bool valid() const {
        return c1.x < c2.x && c1.y < c2.y && c1.x >= 0.0 && c1.y >= 0.0 &&
               c2.x <= 1.0 && c2.y <= 1.0;
    }

    friend bool operator==(const BBox&, const BBox&) = default;
};

/// Throws std::invalid_argument when the corner ordering or range
/// invariants do not hold.
BBox make_bbox(double x1, double y1, double x2, double y2,
               BoxSpace space = BoxSpace::original);

/// Intersection-over-union of two axis-aligned boxes (spaces are not
/// checked; caller compares boxes in one space).
double iou(const BBox& a, const BBox& b);

} // namespace nuzoom

#endif // NUZOOM_BBOX_HPP
