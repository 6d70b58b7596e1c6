// Copyright (c) 2026 The nuzoom Authors.
// Licensed under the Apache License, Version 2.0.

#include <doctest.h>

#include <stdexcept>

#include <algorithm>

#include "nuzoom/rng.hpp"
#include "nuzoom/warp.hpp"
#include "nuzoom/zoom_objective.hpp"

using namespace nuzoom;

namespace {

// u = 0.25 + 0.5 x, v = 0.25 + 0.5 y: samples the central half of the
// original, magnifying it by two per axis.
SamplingGrid central_zoom_grid(GridDims dims) {
    SamplingGrid g = make_uniform_grid(dims);
    for (double& u : g.u.data()) u = 0.25 + 0.5 * u;
    for (double& v : g.v.data()) v = 0.25 + 0.5 * v;
    return g;
}

} // namespace

TEST_CASE("bilinear_sample on the 2x2 ramp") {
    Image img = make_image({2, 2}, 1);
    img.channels[0](0, 0) = 0.0;
    img.channels[0](0, 1) = 1.0;
    img.channels[0](1, 0) = 2.0;
    img.channels[0](1, 1) = 3.0;

    CHECK(bilinear_sample(img, {0.0, 0.0}, 0) == 0.0);
    CHECK(bilinear_sample(img, {0.5, 0.5}, 0) == doctest::Approx(1.5));
    CHECK(bilinear_sample(img, {1.0, 1.0}, 0) == 3.0);
    CHECK(bilinear_sample(img, {1.0, 0.0}, 0) == 1.0);
    // border replication outside [0,1]
    CHECK(bilinear_sample(img, {-0.4, 0.0}, 0) == 0.0);
    CHECK(bilinear_sample(img, {1.7, 1.9}, 0) == 3.0);
    CHECK_THROWS_AS(bilinear_sample(img, {0.5, 0.5}, 1), std::invalid_argument);
}

TEST_CASE("bilinear_sample reproduces node values and stays in range") {
    Rng rng(5);
    Image img = make_image({7, 9}, 1);
    for (double& v : img.channels[0].data()) v = rng.uniform();
    double lo = 1.0, hi = 0.0;
    for (double v : img.channels[0].data()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    for (int i = 0; i < 7; ++i)
        for (int j = 0; j < 9; ++j) {
            const NormCoord at{j / 8.0, i / 6.0};
            CHECK(bilinear_sample(img, at, 0) == img.channels[0](i, j));
        }
    for (int k = 0; k < 200; ++k) {
        const double v = bilinear_sample(img, {rng.uniform(), rng.uniform()}, 0);
        CHECK(v >= lo);
        CHECK(v <= hi);
    }
}

TEST_CASE("warp_image") {
    SUBCASE("identity grid is the identity") {
        Rng rng(2);
        Image img = make_image({9, 11}, 3);
        for (ScalarField& ch : img.channels)
            for (double& v : ch.data()) v = rng.uniform();
        CHECK(warp_image(img, make_uniform_grid(img.dims())) == img);
    }
    SUBCASE("constant image stays constant under any grid") {
        const Image img = make_image({8, 8}, 1, 0.7);
        Rng rng(4);
        SamplingGrid g = make_uniform_grid({12, 5});
        for (double& u : g.u.data()) u = rng.uniform();
        for (double& v : g.v.data()) v = rng.uniform();
        const Image out = warp_image(img, g);
        for (double v : out.channels[0].data()) CHECK(v == doctest::Approx(0.7));
    }
    SUBCASE("central-zoom grid magnifies a centered feature x2") {
        const GridDims dims{65, 65};
        // feature: the rasterized box [0.4,0.6]^2
        Image img{{rasterize_box_mask(make_bbox(0.4, 0.4, 0.6, 0.6), dims)
                       .values}};
        const Image out = warp_image(img, central_zoom_grid(dims));
        // u in [0.4,0.6] corresponds to x in [0.3,0.7]
        CHECK(out.channels[0](32, 32) == doctest::Approx(1.0));
        CHECK(out.channels[0](32, static_cast<int>(0.5 * 64)) ==
              doctest::Approx(1.0));
        CHECK(out.channels[0](32, 12) == doctest::Approx(0.0)); // x=0.1875
        CHECK(out.channels[0](32, 52) == doctest::Approx(0.0)); // x=0.8125
        // support along the center row roughly doubles
        double in_sum = 0.0, out_sum = 0.0;
        for (int j = 0; j < 65; ++j) {
            in_sum += img.channels[0](32, j);
            out_sum += out.channels[0](32, j);
        }
        CHECK(out_sum == doctest::Approx(2.0 * in_sum).epsilon(0.06));
    }
}

TEST_CASE("mask mass is conserved under node-aligned translation") {
    const GridDims dims{33, 33};
    const BoxMask mask = rasterize_box_mask(make_bbox(0.3, 0.3, 0.6, 0.6), dims);
    SamplingGrid g = make_uniform_grid(dims);
    const int shift_nodes = 4;
    const double shift = static_cast<double>(shift_nodes) / (dims.width - 1);
    for (double& u : g.u.data()) u += shift; // content moves left
    Image warped = warp_image(Image{{mask.values}}, g);
    // interior sums agree: every nonzero source column stays in range
    CHECK(warped.channels[0].sum() == doctest::Approx(mask.values.sum()));
}

TEST_CASE("jacobian_field") {
    SUBCASE("identity grid has the identity Jacobian") {
        const JacobianField jac = jacobian_field(make_uniform_grid({6, 9}));
        for (double v : jac.du_dx.data()) CHECK(v == doctest::Approx(1.0));
        for (double v : jac.dv_dy.data()) CHECK(v == doctest::Approx(1.0));
        for (double v : jac.du_dy.data()) CHECK(v == doctest::Approx(0.0));
        for (double v : jac.dv_dx.data()) CHECK(v == doctest::Approx(0.0));
        const ScalarField det = jac.determinant();
        for (double v : det.data()) CHECK(v == doctest::Approx(1.0));
    }
    SUBCASE("u = 0.5 x has du/dx = 0.5 everywhere") {
        SamplingGrid g = make_uniform_grid({5, 7});
        for (double& u : g.u.data()) u *= 0.5;
        const JacobianField jac = jacobian_field(g);
        for (double v : jac.du_dx.data()) CHECK(v == doctest::Approx(0.5));
    }
    SUBCASE("central-zoom grid has det 0.25") {
        const JacobianField jac = jacobian_field(central_zoom_grid({9, 9}));
        const ScalarField det = jac.determinant();
        for (double v : det.data()) CHECK(v == doctest::Approx(0.25));
    }
}
