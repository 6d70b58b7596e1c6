// Copyright (c) 2026 The nuzoom Authors.
// Licensed under the Apache License, Version 2.0.

#include "nuzoom/zoom_objective.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nuzoom {

void ZoomLossConfig::validate() const {
    if (!(alpha > 0.0))
        throw std::invalid_argument("ZoomLossConfig: alpha must be > 0");
    if (!(beta >= 1.0))
        throw std::invalid_argument("ZoomLossConfig: beta must be >= 1");
    if (!(epsilon > 0.0))
        throw std::invalid_argument("ZoomLossConfig: epsilon must be > 0");
    if (!(reg_weight >= 0.0))
        throw std::invalid_argument("ZoomLossConfig: reg_weight must be >= 0");
}

namespace {

// Fraction of each node cell covered by [lo, hi]. Cells are centered on the
// nodes and clipped to [0,1]; border cells are half width.
std::vector<double> coverage_1d(double lo, double hi, int n) {
    std::vector<double> cov(n, 0.0);
    const double delta = 1.0 / (n - 1);
    for (int j = 0; j < n; ++j) {
        const double cell_lo = std::max(0.0, (j - 0.5) * delta);
        const double cell_hi = std::min(1.0, (j + 0.5) * delta);
        const double overlap =
            std::min(hi, cell_hi) - std::max(lo, cell_lo);
        if (overlap > 0.0) cov[j] = overlap / (cell_hi - cell_lo);
    }
    return cov;
}

// Separable coverage of one box: mask(i,j) = row[i] * col[j]. Samples are
// exactly zero outside the support bounds (box grown by the bilinear
// footprint), which lets the hot loops skip distant boxes.
struct CoverageProfile {
    std::vector<double> col; // per column, along u
    std::vector<double> row; // per row, along v
    double mass = 0.0;
    double u_lo = 0.0, u_hi = 0.0, v_lo = 0.0, v_hi = 0.0;
};

CoverageProfile make_profile(const BBox& box, GridDims dims) {
    if (!box.valid())
        throw std::invalid_argument("box violates corner invariants");
    CoverageProfile p;
    p.col = coverage_1d(box.c1.x, box.c2.x, dims.width);
    p.row = coverage_1d(box.c1.y, box.c2.y, dims.height);
    double cs = 0.0, rs = 0.0;
    for (double v : p.col) cs += v;
    for (double v : p.row) rs += v;
    p.mass = cs * rs;
    const double mx = 1.6 / (dims.width - 1);
    const double my = 1.6 / (dims.height - 1);
    p.u_lo = box.c1.x - mx;
    p.u_hi = box.c2.x + mx;
    p.v_lo = box.c1.y - my;
    p.v_hi = box.c2.y + my;
    return p;
}

// One-axis interpolation stencil at a fractional pixel position, with the
// same snapping and border replication as bilinear_at.
struct Tap {
    int lo;
    int hi;
    double frac;
};

Tap tap_at(double pos, int n) {
    pos = std::clamp(pos, 0.0, static_cast<double>(n - 1));
    if (std::abs(pos - std::round(pos)) < kNodeSnapEps) pos = std::round(pos);
    const int lo = static_cast<int>(pos);
    return {lo, std::min(lo + 1, n - 1), pos - lo};
}

double loss_term(double m, const ZoomLossConfig& cfg) {
    const double z = std::log((cfg.alpha + cfg.epsilon) / (m + cfg.epsilon));
    return z > 0.0 ? std::pow(z, cfg.beta) : 0.0;
}

// d loss_term / d m; zero on the saturated branch.
double loss_term_slope(double m, const ZoomLossConfig& cfg) {
    const double z = std::log((cfg.alpha + cfg.epsilon) / (m + cfg.epsilon));
    if (z <= 0.0) return 0.0;
    return -cfg.beta * std::pow(z, cfg.beta - 1.0) / (m + cfg.epsilon);
}

} // namespace

BoxMask rasterize_box_mask(const BBox& box, GridDims dims) {
    if (!dims.valid())
        throw std::invalid_argument("rasterize_box_mask: dims must be >= 2x2");
    const CoverageProfile p = make_profile(box, dims);
    if (!(p.mass > 0.0))
        throw std::invalid_argument(
            "rasterize_box_mask: box has zero area at this resolution");
    BoxMask mask{ScalarField(dims)};
    for (int i = 0; i < dims.height; ++i)
        for (int j = 0; j < dims.width; ++j)
            mask.values(i, j) = p.row[i] * p.col[j];
    return mask;
}

double zoom_ratio(const BoxMask& mask, const SamplingGrid& grid) {
    const double total = mask.sum();
    if (!(total > 0.0))
        throw std::invalid_argument("zoom_ratio: mask has zero mass");
    Image as_image{{mask.values}};
    const Image warped = warp_image(as_image, grid);
    return warped.channels[0].sum() / total;
}

double zoom_loss(const std::vector<double>& ratios, const ZoomLossConfig& cfg) {
    cfg.validate();
    double total = 0.0;
    for (double m : ratios) {
        if (!(m >= 0.0))
            throw std::invalid_argument("zoom_loss: ratios must be >= 0");
        total += loss_term(m, cfg);
    }
    if (cfg.mean_reduce && !ratios.empty())
        total /= static_cast<double>(ratios.size());
    return total;
}

ZoomObjectiveEval evaluate_zoom_objective(const std::vector<BBox>& boxes,
                                          const SamplingGrid& base,
                                          const OffsetField& offsets,
                                          const ZoomLossConfig& cfg) {
    cfg.validate();
    if (!base.dims().valid())
        throw std::invalid_argument("evaluate_zoom_objective: bad grid");
    if (!(offsets.dims() == base.dims()))
        throw std::invalid_argument(
            "evaluate_zoom_objective: offsets must be at grid resolution");

    const GridDims d = base.dims();
    const int n_boxes = static_cast<int>(boxes.size());
    std::vector<CoverageProfile> profiles;
    profiles.reserve(boxes.size());
    for (const BBox& b : boxes) {
        profiles.push_back(make_profile(b, d));
        if (!(profiles.back().mass > 0.0))
            throw std::invalid_argument(
                "evaluate_zoom_objective: box with zero mask mass");
    }

    ZoomObjectiveEval eval;
    eval.grad = GradField{ScalarField(d), ScalarField(d)};

    // Forward: clamped sampling coordinates and per-box warped-mask sums.
    ScalarField uc(d), vc(d);
    std::vector<double> sums(boxes.size(), 0.0);
    for (int i = 0; i < d.height; ++i) {
        for (int j = 0; j < d.width; ++j) {
            const double u = std::clamp(base.u(i, j) + offsets.dx(i, j), 0.0, 1.0);
            const double v = std::clamp(base.v(i, j) + offsets.dy(i, j), 0.0, 1.0);
            uc(i, j) = u;
            vc(i, j) = v;
            const Tap tx = tap_at(u * (d.width - 1), d.width);
            const Tap ty = tap_at(v * (d.height - 1), d.height);
            for (int b = 0; b < n_boxes; ++b) {
                const CoverageProfile& p = profiles[b];
                if (u < p.u_lo || u > p.u_hi || v < p.v_lo || v > p.v_hi)
                    continue;
                const double cx =
                    (1.0 - tx.frac) * p.col[tx.lo] + tx.frac * p.col[tx.hi];
                const double cy =
                    (1.0 - ty.frac) * p.row[ty.lo] + ty.frac * p.row[ty.hi];
                sums[b] += cx * cy;
            }
        }
    }

    eval.ratios.resize(boxes.size());
    std::vector<double> dldm(boxes.size());
    const double reduce =
        cfg.mean_reduce && n_boxes > 0 ? 1.0 / n_boxes : 1.0;
    for (int b = 0; b < n_boxes; ++b) {
        const double m = sums[b] / profiles[b].mass;
        eval.ratios[b] = m;
        eval.zoom_term += loss_term(m, cfg) * reduce;
        dldm[b] = loss_term_slope(m, cfg) * reduce / profiles[b].mass;
    }

    // Backward: chain d loss / d sample through the interpolation partials.
    // d(sample)/du in normalized units picks up the pixel scale.
    const double su = static_cast<double>(d.width - 1);
    const double sv = static_cast<double>(d.height - 1);
    for (int i = 0; i < d.height; ++i) {
        for (int j = 0; j < d.width; ++j) {
            const double u_pre = base.u(i, j) + offsets.dx(i, j);
            const double v_pre = base.v(i, j) + offsets.dy(i, j);
            const double u = uc(i, j);
            const double v = vc(i, j);
            const Tap tx = tap_at(u * su, d.width);
            const Tap ty = tap_at(v * sv, d.height);
            double gx = 0.0, gy = 0.0;
            for (int b = 0; b < n_boxes; ++b) {
                if (dldm[b] == 0.0) continue;
                const CoverageProfile& p = profiles[b];
                if (u < p.u_lo || u > p.u_hi || v < p.v_lo || v > p.v_hi)
                    continue;
                const double dcx = p.col[tx.hi] - p.col[tx.lo];
                const double dcy = p.row[ty.hi] - p.row[ty.lo];
                const double cx =
                    (1.0 - tx.frac) * p.col[tx.lo] + tx.frac * p.col[tx.hi];
                const double cy =
                    (1.0 - ty.frac) * p.row[ty.lo] + ty.frac * p.row[ty.hi];
                gx += dldm[b] * dcx * cy * su;
                gy += dldm[b] * dcy * cx * sv;
            }
            // A coordinate pushed past the clamp no longer responds to its
            // offset; the regularizer still does.
            if (u_pre < 0.0 || u_pre > 1.0) gx = 0.0;
            if (v_pre < 0.0 || v_pre > 1.0) gy = 0.0;
            const double ox = offsets.dx(i, j);
            const double oy = offsets.dy(i, j);
            eval.grad.d_dx(i, j) = gx + 2.0 * cfg.reg_weight * ox;
            eval.grad.d_dy(i, j) = gy + 2.0 * cfg.reg_weight * oy;
            eval.reg_term += cfg.reg_weight * (ox * ox + oy * oy);
        }
    }
    eval.total = eval.zoom_term + eval.reg_term;
    return eval;
}

GradField zoom_loss_gradient(const std::vector<BBox>& boxes,
                             const SamplingGrid& base,
                             const OffsetField& offsets,
                             const ZoomLossConfig& cfg) {
    return evaluate_zoom_objective(boxes, base, offsets, cfg).grad;
}

GradCheckReport finite_diff_check(const std::vector<BBox>& boxes,
                                  const SamplingGrid& base,
                                  const OffsetField& offsets,
                                  const ZoomLossConfig& cfg,
                                  double step) {
    if (!(step > 0.0))
        throw std::invalid_argument("finite_diff_check: step must be > 0");
    const GridDims d = base.dims();
    const GradField analytic = zoom_loss_gradient(boxes, base, offsets, cfg);

    // Reference route: rasterized masks sampled with bilinear_at. Perturbing
    // one offset component changes exactly one sample of each mask, so each
    // perturbed loss is reconstructed from the per-box sums.
    std::vector<ScalarField> masks;
    std::vector<double> masses;
    for (const BBox& b : boxes) {
        masks.push_back(rasterize_box_mask(b, d).values);
        masses.push_back(masks.back().sum());
    }
    const int n_boxes = static_cast<int>(boxes.size());
    const double su = static_cast<double>(d.width - 1);
    const double sv = static_cast<double>(d.height - 1);

    std::vector<double> ref_sums(boxes.size(), 0.0);
    ScalarField uc(d), vc(d);
    for (int i = 0; i < d.height; ++i)
        for (int j = 0; j < d.width; ++j) {
            const double u = std::clamp(base.u(i, j) + offsets.dx(i, j), 0.0, 1.0);
            const double v = std::clamp(base.v(i, j) + offsets.dy(i, j), 0.0, 1.0);
            uc(i, j) = u;
            vc(i, j) = v;
            for (int b = 0; b < n_boxes; ++b)
                ref_sums[b] += bilinear_at(masks[b], v * sv, u * su);
        }

    double reg_rest = 0.0;
    for (int i = 0; i < d.height; ++i)
        for (int j = 0; j < d.width; ++j)
            reg_rest += cfg.reg_weight * (offsets.dx(i, j) * offsets.dx(i, j) +
                                          offsets.dy(i, j) * offsets.dy(i, j));

    GradCheckReport report;
    report.rel_err_dx = ScalarField(d);
    report.rel_err_dy = ScalarField(d);

    double gscale = 0.0;
    for (double g : analytic.d_dx.data()) gscale = std::max(gscale, std::abs(g));
    for (double g : analytic.d_dy.data()) gscale = std::max(gscale, std::abs(g));
    const double floor = std::max(1e-12, 1e-7 * gscale);

    std::vector<double> ratios(boxes.size());
    auto perturbed_loss = [&](int i, int j, bool x_axis, double h) {
        const double u0 = uc(i, j);
        const double v0 = vc(i, j);
        double u = u0, v = v0, off;
        if (x_axis) {
            off = offsets.dx(i, j);
            u = std::clamp(base.u(i, j) + off + h, 0.0, 1.0);
        } else {
            off = offsets.dy(i, j);
            v = std::clamp(base.v(i, j) + off + h, 0.0, 1.0);
        }
        for (int b = 0; b < n_boxes; ++b) {
            const double a0 = bilinear_at(masks[b], v0 * sv, u0 * su);
            const double a1 = bilinear_at(masks[b], v * sv, u * su);
            ratios[b] = (ref_sums[b] - a0 + a1) / masses[b];
        }
        const double reg = reg_rest - cfg.reg_weight * off * off +
                           cfg.reg_weight * (off + h) * (off + h);
        return zoom_loss(ratios, cfg) + reg;
    };

    auto near_integer = [](double pos, double margin) {
        return std::abs(pos - std::round(pos)) <= margin;
    };
    // Loss kink at m == alpha only matters for beta == 1 (the max() corner).
    bool ratio_kink = false;
    if (cfg.beta < 1.5) {
        for (int b = 0; b < n_boxes; ++b)
            if (std::abs(ref_sums[b] / masses[b] - cfg.alpha) < 1e3 * step)
                ratio_kink = true;
    }

    for (int i = 0; i < d.height; ++i) {
        for (int j = 0; j < d.width; ++j) {
            for (int axis = 0; axis < 2; ++axis) {
                const bool x_axis = axis == 0;
                const double pre = x_axis ? base.u(i, j) + offsets.dx(i, j)
                                          : base.v(i, j) + offsets.dy(i, j);
                const double pos = x_axis ? uc(i, j) * su : vc(i, j) * sv;
                const double scale = x_axis ? su : sv;
                ScalarField& err_out =
                    x_axis ? report.rel_err_dx : report.rel_err_dy;
                const bool kink = near_integer(pos, step * scale + 1e-6) ||
                                  std::abs(pre) <= step + 1e-9 ||
                                  std::abs(pre - 1.0) <= step + 1e-9 ||
                                  ratio_kink;
                if (kink) {
                    err_out(i, j) = -1.0;
                    ++report.excluded;
                    continue;
                }
                const double lp = perturbed_loss(i, j, x_axis, step);
                const double lm = perturbed_loss(i, j, x_axis, -step);
                const double fd = (lp - lm) / (2.0 * step);
                const double ga =
                    x_axis ? analytic.d_dx(i, j) : analytic.d_dy(i, j);
                const double denom = std::max(std::abs(ga), std::abs(fd));
                const double err =
                    denom < floor ? 0.0 : std::abs(ga - fd) / denom;
                err_out(i, j) = err;
                report.max_rel_error = std::max(report.max_rel_error, err);
                ++report.checked;
            }
        }
    }
    return report;
}

} // namespace nuzoom
