// Copyright (c) 2026 The nuzoom Authors.
// Licensed under the Apache License, Version 2.0.

#include "nuzoom/bbox.hpp"

#include <algorithm>
#include <stdexcept>

namespace nuzoom {

BBox make_bbox(double x1, double y1, double x2, double y2, BoxSpace space) {
    BBox b{{x1, y1}, {x2, y2}, space};
    if (!b.valid())
        throw std::invalid_argument(
            "make_bbox: need 0 <= x1 < x2 <= 1 and 0 <= y1 < y2 <= 1");
    return b;
}

double iou(const BBox& a, const BBox& b) {
    const double ix = std::max(
        0.0, std::min(a.c2.x, b.c2.x) - std::max(a.c1.x, b.c1.x));
    const double iy = std::max(
        0.0, std::min(a.c2.y, b.c2.y) - std::max(a.c1.y, b.c1.y));
    const double inter = ix * iy;
    const double uni = a.area() + b.area() - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

} // namespace nuzoom
