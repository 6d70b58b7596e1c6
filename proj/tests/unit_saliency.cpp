// Copyright (c) 2026 The nuzoom Authors.
// Licensed under the Apache License, Version 2.0.

#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "nuzoom/rng.hpp"
#include "nuzoom/saliency.hpp"

using namespace nuzoom;

namespace {

// Straightforward full-window weighted average, written independently of
// the implementation; valid as a reference when radius covers the map.
NormCoord pulled_coordinate(const SaliencyMap& sal, double sigma, double x,
                            double y) {
    const GridDims d = sal.dims();
    double wsum = 0.0, u = 0.0, v = 0.0;
    for (int i = 0; i < d.height; ++i)
        for (int j = 0; j < d.width; ++j) {
            const double xp = static_cast<double>(j) / (d.width - 1);
            const double yp = static_cast<double>(i) / (d.height - 1);
            const double dist2 = (x - xp) * (x - xp) + (y - yp) * (y - yp);
            const double w =
                sal.values(i, j) * std::exp(-dist2 / (2.0 * sigma * sigma));
            wsum += w;
            u += w * xp;
            v += w * yp;
        }
    return {u / wsum, v / wsum};
}

} // namespace

TEST_CASE("uniform saliency with wide kernel pulls everything to the center") {
    SaliencyMap sal{ScalarField({9, 9}, 1.0)};
    // the residual pull scales like 1/sigma^2
    const SamplingGrid g = saliency_grid(sal, {10.0, 16}, {9, 9});
    for (double u : g.u.data()) CHECK(std::abs(u - 0.5) < 1e-3);
    for (double v : g.v.data()) CHECK(std::abs(v - 0.5) < 1e-3);
    // the central node is exact by window symmetry
    CHECK(g.u(4, 4) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(g.v(4, 4) == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("saliency grid matches the untruncated reference on a 5x5 map") {
    SaliencyMap sal{ScalarField({5, 5}, 0.0)};
    Rng rng(9);
    for (double& v : sal.values.data()) v = rng.uniform(0.0, 1.0);
    sal.values(2, 2) = 3.0;
    const double sigma = 0.3;
    const SamplingGrid g = saliency_grid(sal, {sigma, 8}, {5, 5});
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            const NormCoord ref =
                pulled_coordinate(sal, sigma, j / 4.0, i / 4.0);
            CHECK(g.u(i, j) == doctest::Approx(ref.x).epsilon(1e-12));
            CHECK(g.v(i, j) == doctest::Approx(ref.y).epsilon(1e-12));
        }
}

TEST_CASE("single spike pulls supported nodes onto it; others keep identity") {
    SaliencyMap sal{ScalarField({5, 5}, 0.0)};
    sal.values(2, 2) = 1.0;
    SUBCASE("radius covering the map pulls every node to the spike") {
        const SamplingGrid g = saliency_grid(sal, {0.25, 4}, {5, 5});
        for (double u : g.u.data()) CHECK(u == doctest::Approx(0.5));
        for (double v : g.v.data()) CHECK(v == doctest::Approx(0.5));
    }
    SUBCASE("radius 1 leaves far nodes on the uniform grid") {
        const SamplingGrid g = saliency_grid(sal, {0.25, 1}, {5, 5});
        CHECK(g.u(2, 1) == doctest::Approx(0.5)); // spike in window
        CHECK(g.u(0, 0) == doctest::Approx(0.0)); // empty window: identity
        CHECK(g.v(0, 0) == doctest::Approx(0.0));
        CHECK(g.u(4, 4) == doctest::Approx(1.0));
    }
}

TEST_CASE("mirror-symmetric saliency gives an antisymmetric u field") {
    const GridDims d{7, 8};
    SaliencyMap sal{ScalarField(d, 0.0)};
    Rng rng(21);
    for (int i = 0; i < d.height; ++i)
        for (int j = 0; j < d.width / 2; ++j) {
            const double v = rng.uniform(0.1, 1.0);
            sal.values(i, j) = v;
            sal.values(i, d.width - 1 - j) = v;
        }
    const GridDims out{7, 9};
    const SamplingGrid g = saliency_grid(sal, {0.2, 3}, out);
    for (int i = 0; i < out.height; ++i)
        for (int j = 0; j < out.width; ++j) {
            const double mirrored = g.u(i, out.width - 1 - j);
            CHECK(g.u(i, j) == doctest::Approx(1.0 - mirrored).epsilon(1e-12));
        }
}

TEST_CASE("positive scaling of the saliency map leaves the grid unchanged") {
    SaliencyMap sal{ScalarField({6, 6}, 0.0)};
    Rng rng(33);
    for (double& v : sal.values.data()) v = rng.uniform(0.0, 2.0);
    SaliencyMap scaled{sal.values};
    for (double& v : scaled.values.data()) v *= 137.0;
    const SamplingGrid a = saliency_grid(sal, {0.15, 3}, {6, 6});
    const SamplingGrid b = saliency_grid(scaled, {0.15, 3}, {6, 6});
    for (size_t k = 0; k < a.u.data().size(); ++k) {
        CHECK(a.u.data()[k] == doctest::Approx(b.u.data()[k]).epsilon(1e-13));
        CHECK(a.v.data()[k] == doctest::Approx(b.v.data()[k]).epsilon(1e-13));
    }
}

TEST_CASE("pulled coordinates stay inside the support's bounding box") {
    SaliencyMap sal{ScalarField({9, 9}, 0.0)};
    // all saliency inside columns 2..4 (x in [0.25, 0.5])
    Rng rng(40);
    for (int i = 0; i < 9; ++i)
        for (int j = 2; j <= 4; ++j) sal.values(i, j) = rng.uniform(0.2, 1.0);
    const SamplingGrid g = saliency_grid(sal, {5.0, 16}, {9, 9});
    for (double u : g.u.data()) {
        CHECK(u >= 0.25 - 1e-12);
        CHECK(u <= 0.5 + 1e-12);
    }
}

TEST_CASE("saliency error cases") {
    SaliencyMap zero{ScalarField({4, 4}, 0.0)};
    CHECK_THROWS_AS(saliency_grid(zero, {0.2, 2}, {4, 4}),
                    std::invalid_argument);
    SaliencyMap ok{ScalarField({4, 4}, 1.0)};
    CHECK_THROWS_AS(saliency_grid(ok, {0.0, 2}, {4, 4}), std::invalid_argument);
    CHECK_THROWS_AS(saliency_grid(ok, {0.2, 0}, {4, 4}), std::invalid_argument);
    SaliencyMap negative{ScalarField({4, 4}, 1.0)};
    negative.values(1, 1) = -0.5;
    CHECK_THROWS_AS(saliency_grid(negative, {0.2, 2}, {4, 4}),
                    std::invalid_argument);
}
