// Copyright (c) 2026 The nuzoom Authors.
// Licensed under the Apache License, Version 2.0.

#include <doctest.h>

#include <stdexcept>

#include "nuzoom/geometry.hpp"
#include "nuzoom/rng.hpp"
#include "nuzoom/warp.hpp"

using namespace nuzoom;

TEST_CASE("uniform grid holds identity coordinates") {
    SUBCASE("2x2 corners") {
        const SamplingGrid g = make_uniform_grid({2, 2});
        CHECK(g.u(0, 0) == 0.0);
        CHECK(g.v(0, 0) == 0.0);
        CHECK(g.u(0, 1) == 1.0);
        CHECK(g.v(0, 1) == 0.0);
        CHECK(g.u(1, 0) == 0.0);
        CHECK(g.v(1, 0) == 1.0);
        CHECK(g.u(1, 1) == 1.0);
        CHECK(g.v(1, 1) == 1.0);
    }
    SUBCASE("3x3 center node is the midpoint") {
        const SamplingGrid g = make_uniform_grid({3, 3});
        CHECK(g.u(1, 1) == 0.5);
        CHECK(g.v(1, 1) == 0.5);
    }
    SUBCASE("invalid dims rejected") {
        CHECK_THROWS_AS(make_uniform_grid({1, 5}), std::invalid_argument);
        CHECK_THROWS_AS(make_uniform_grid({5, 0}), std::invalid_argument);
    }
}

TEST_CASE("identity warp is bit-exact") {
    Rng rng(7);
    Image img = make_image({13, 29}, 2);
    for (ScalarField& ch : img.channels)
        for (double& v : ch.data()) v = rng.uniform();
    const Image warped = warp_image(img, make_uniform_grid(img.dims()));
    CHECK(warped == img);
}

TEST_CASE("upsample_offsets") {
    SUBCASE("constant fields stay constant") {
        OffsetField f = zero_offsets({3, 4});
        for (double& v : f.dx.data()) v = 0.37;
        for (double& v : f.dy.data()) v = -0.12;
        const OffsetField up = upsample_offsets(f, {9, 17});
        for (double v : up.dx.data()) CHECK(v == doctest::Approx(0.37).epsilon(1e-15));
        for (double v : up.dy.data()) CHECK(v == doctest::Approx(-0.12).epsilon(1e-15));
    }
    SUBCASE("same dims is the identity") {
        OffsetField f = zero_offsets({4, 4});
        Rng rng(3);
        for (double& v : f.dx.data()) v = rng.normal();
        const OffsetField up = upsample_offsets(f, {4, 4});
        CHECK(up == f);
    }
    SUBCASE("2x2 ramp onto 2x3: middle column is the average") {
        OffsetField f = zero_offsets({2, 2});
        f.dx(0, 0) = 0.0;
        f.dx(0, 1) = 1.0;
        f.dx(1, 0) = 0.0;
        f.dx(1, 1) = 1.0;
        const OffsetField up = upsample_offsets(f, {2, 3});
        CHECK(up.dx(0, 1) == doctest::Approx(0.5));
        CHECK(up.dx(1, 1) == doctest::Approx(0.5));
        CHECK(up.dx(0, 0) == 0.0);
        CHECK(up.dx(0, 2) == 1.0);
    }
    SUBCASE("exact on fields bilinear in the node coordinates") {
        const GridDims low{5, 7}, high{33, 21};
        OffsetField f = zero_offsets(low);
        const double a = 0.03, b = -0.2, c = 0.11, d = 0.4;
        for (int i = 0; i < low.height; ++i)
            for (int j = 0; j < low.width; ++j) {
                const double x = static_cast<double>(j) / (low.width - 1);
                const double y = static_cast<double>(i) / (low.height - 1);
                f.dx(i, j) = a + b * x + c * y + d * x * y;
                f.dy(i, j) = -a + c * x - b * y + 0.5 * d * x * y;
            }
        const OffsetField up = upsample_offsets(f, high);
        for (int i = 0; i < high.height; ++i)
            for (int j = 0; j < high.width; ++j) {
                const double x = static_cast<double>(j) / (high.width - 1);
                const double y = static_cast<double>(i) / (high.height - 1);
                CHECK(up.dx(i, j) ==
                      doctest::Approx(a + b * x + c * y + d * x * y)
                          .epsilon(1e-12));
            }
    }
    SUBCASE("bad target rejected") {
        CHECK_THROWS_AS(upsample_offsets(zero_offsets({3, 3}), {1, 8}),
                        std::invalid_argument);
    }
}

TEST_CASE("apply_offsets") {
    const GridDims d{5, 5};
    const SamplingGrid base = make_uniform_grid(d);

    SUBCASE("zero offsets leave the grid unchanged") {
        const SamplingGrid g = apply_offsets(base, zero_offsets(d), true);
        CHECK(g == base);
    }
    SUBCASE("clamp pins overflowing coordinates") {
        OffsetField f = zero_offsets(d);
        for (double& v : f.dx.data()) v = 0.1;
        const SamplingGrid g = apply_offsets(base, f, true);
        CHECK(g.u(0, 4) == 1.0); // x=1.0 + 0.1 clamps
        CHECK(g.u(0, 2) == doctest::Approx(0.6));
    }
    SUBCASE("negative shift, clamped at zero below x=0.25") {
        OffsetField f = zero_offsets(d);
        for (double& v : f.dx.data()) v = -0.25;
        const SamplingGrid g = apply_offsets(base, f, true);
        for (int j = 0; j < d.width; ++j) {
            const double x = static_cast<double>(j) / (d.width - 1);
            CHECK(g.u(2, j) == doctest::Approx(std::max(0.0, x - 0.25)));
        }
    }
    SUBCASE("dims mismatch rejected") {
        CHECK_THROWS_AS(apply_offsets(base, zero_offsets({4, 5}), false),
                        std::invalid_argument);
    }
    SUBCASE("offsets compose additively without clamping") {
        Rng rng(11);
        OffsetField f = zero_offsets(d), g = zero_offsets(d),
                    sum = zero_offsets(d);
        for (size_t k = 0; k < f.dx.data().size(); ++k) {
            f.dx.data()[k] = 0.1 * rng.normal();
            g.dx.data()[k] = 0.1 * rng.normal();
            f.dy.data()[k] = 0.1 * rng.normal();
            g.dy.data()[k] = 0.1 * rng.normal();
            sum.dx.data()[k] = f.dx.data()[k] + g.dx.data()[k];
            sum.dy.data()[k] = f.dy.data()[k] + g.dy.data()[k];
        }
        const SamplingGrid two_steps =
            apply_offsets(apply_offsets(base, f, false), g, false);
        const SamplingGrid one_step = apply_offsets(base, sum, false);
        for (int i = 0; i < d.height; ++i)
            for (int j = 0; j < d.width; ++j) {
                CHECK(two_steps.u(i, j) ==
                      doctest::Approx(one_step.u(i, j)).epsilon(1e-14));
                CHECK(two_steps.v(i, j) ==
                      doctest::Approx(one_step.v(i, j)).epsilon(1e-14));
            }
    }
}
