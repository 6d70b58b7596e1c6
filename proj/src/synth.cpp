// Copyright (c) 2026 The nuzoom Authors.
// Licensed under the Apache License, Version 2.0.

#include "nuzoom/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nuzoom/rng.hpp"

namespace nuzoom {

void SynthConfig::validate() const {
    if (count < 1)
        throw std::invalid_argument("SynthConfig: count must be >= 1");
    if (!canvas.valid())
        throw std::invalid_argument("SynthConfig: canvas must be >= 2x2");
    if (boxes_per_scene < 1)
        throw std::invalid_argument("SynthConfig: need at least one box");
    if (!(min_box_px >= 2.0) || !(max_box_px >= min_box_px))
        throw std::invalid_argument("SynthConfig: bad box size range");
    if (!(max_overlap_iou >= 0.0 && max_overlap_iou <= 1.0))
        throw std::invalid_argument("SynthConfig: bad overlap limit");
}

namespace {

double sample_size_px(Rng& rng, const SynthConfig& cfg) {
    const double t = rng.uniform();
    const double skew =
        cfg.profile == SizeProfile::small_heavy ? std::pow(t, 5.0) : t;
    return cfg.min_box_px + skew * (cfg.max_box_px - cfg.min_box_px);
}

Image render_scene(const SynthConfig& cfg, const std::vector<SceneBox>& boxes,
                   Rng& rng) {
    const GridDims d = cfg.canvas;
    Image img = make_image(d, 1);
    ScalarField& f = img.channels[0];

    // Low-frequency value noise background.
    const int coarse_n = 9;
    ScalarField coarse({coarse_n, coarse_n});
    for (double& v : coarse.data()) v = rng.uniform(0.15, 0.45);
    ScalarField fine({33, 33});
    for (double& v : fine.data()) v = rng.uniform(-0.06, 0.06);
    for (int i = 0; i < d.height; ++i) {
        const double y = static_cast<double>(i) / (d.height - 1);
        for (int j = 0; j < d.width; ++j) {
            const double x = static_cast<double>(j) / (d.width - 1);
            f(i, j) = bilinear_at(coarse, y * (coarse_n - 1), x * (coarse_n - 1)) +
                      bilinear_at(fine, y * 32, x * 32);
        }
    }

    // Bright patches with a dark rim and a diagonal ramp, one per box.
    for (const SceneBox& sb : boxes) {
        const int r0 = static_cast<int>(std::floor(sb.box.c1.y * (d.height - 1)));
        const int r1 = static_cast<int>(std::ceil(sb.box.c2.y * (d.height - 1)));
        const int c0 = static_cast<int>(std::floor(sb.box.c1.x * (d.width - 1)));
        const int c1 = static_cast<int>(std::ceil(sb.box.c2.x * (d.width - 1)));
        const double base = rng.uniform(0.75, 0.95);
        for (int i = std::max(0, r0); i <= std::min(d.height - 1, r1); ++i) {
            for (int j = std::max(0, c0); j <= std::min(d.width - 1, c1); ++j) {
                const bool rim = i == r0 || i == r1 || j == c0 || j == c1;
                const double ramp =
                    0.1 * (i - r0 + j - c0) / std::max(1, r1 - r0 + c1 - c0);
                f(i, j) = rim ? 0.05 : std::min(1.0, base + ramp);
            }
        }
    }
    for (double& v : f.data()) v = std::clamp(v, 0.0, 1.0);
    return img;
}

} // namespace

std::vector<SynthScene> synth_scenes(const SynthConfig& cfg) {
    cfg.validate();
    std::vector<SynthScene> scenes;
    scenes.reserve(cfg.count);
    for (int s = 0; s < cfg.count; ++s) {
        Rng rng(mix_seed(cfg.seed, static_cast<uint64_t>(s)));
        SynthScene out;
        out.scene.id = s;
        out.scene.image_dims = cfg.canvas;

        const double W = cfg.canvas.width;
        const double H = cfg.canvas.height;
        for (int b = 0; b < cfg.boxes_per_scene; ++b) {
            bool placed = false;
            for (int attempt = 0; attempt < cfg.max_placement_retries;
                 ++attempt) {
                const double bw = sample_size_px(rng, cfg);
                const double bh = sample_size_px(rng, cfg);
                if (bw >= W - 4.0 || bh >= H - 4.0) continue;
                const double x = rng.uniform(2.0, W - bw - 2.0);
                const double y = rng.uniform(2.0, H - bh - 2.0);
                const BBox cand{{x / W, y / H}, {(x + bw) / W, (y + bh) / H},
                                BoxSpace::original};
                bool ok = true;
                for (const SceneBox& other : out.scene.boxes)
                    if (iou(cand, other.box) > cfg.max_overlap_iou) {
                        ok = false;
                        break;
                    }
                if (!ok) continue;
                out.scene.boxes.push_back({cand, 1 + rng.uniform_int(0, 2)});
                placed = true;
                break;
            }
            if (!placed) {
                out.placement_truncated = true;
                break;
            }
        }

        if (cfg.make_images) out.image = render_scene(cfg, out.scene.boxes, rng);
        scenes.push_back(std::move(out));
    }
    return scenes;
}

} // namespace nuzoom
