// Copyright (c) 2026 The nuzoom Authors.
// Licensed under the Apache License, Version 2.0.
//
// Batch driver for the adaptive zoom pipeline: synthesize scenes, optimize
// offsets, warp images, transform annotations, and audit the geometry.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "nuzoom/box_transform.hpp"
#include "nuzoom/image_io.hpp"
#include "nuzoom/pipeline.hpp"
#include "nuzoom/rng.hpp"
#include "nuzoom/synth.hpp"
#include "nuzoom/zoom_objective.hpp"

namespace fs = std::filesystem;
using nuzoom::GridDims;

namespace {

struct DimsOption {
    int height = 0;
    int width = 0;
};

void add_dims_option(CLI::App* app, const std::string& name, DimsOption& dims,
                     const std::string& desc) {
    app->add_option_function<std::string>(
           name,
           [&dims, name](const std::string& text) {
               if (std::sscanf(text.c_str(), "%dx%d", &dims.height,
                               &dims.width) != 2)
                   throw CLI::ValidationError(name, "expected HxW, e.g. 128x128");
           },
           desc + " as HxW")
        ->expected(1);
}

void add_run_options(CLI::App* app, nuzoom::RunConfig& cfg, DimsOption& proc,
                     std::string& parametrization) {
    app->add_option("--steps", cfg.solver.steps, "solver iterations");
    app->add_option("--lr", cfg.solver.learning_rate, "solver learning rate");
    app->add_option("--momentum", cfg.solver.momentum, "solver momentum");
    app->add_option("--init-scale", cfg.solver.init_scale,
                    "stddev of the random offset init (0 = zeros)");
    app->add_option("--alpha", cfg.solver.loss_cfg.alpha,
                    "magnification threshold");
    app->add_option("--beta", cfg.solver.loss_cfg.beta, "loss shape exponent");
    app->add_option("--epsilon", cfg.solver.loss_cfg.epsilon, "loss stabilizer");
    app->add_option("--reg", cfg.solver.loss_cfg.reg_weight,
                    "offset L2 penalty weight");
    app->add_option("--offset-scale", cfg.offset_scale,
                    "offset grid fraction of the processing resolution");
    add_dims_option(app, "--process-size", proc, "processing resolution");
    app->add_option("--parametrization", parametrization,
                    "grid parametrization: offset or saliency")
        ->check(CLI::IsMember({"offset", "saliency"}));
    app->add_option("--saliency-blur", cfg.saliency.blur_sigma,
                    "saliency raster blur sigma (normalized)");
    app->add_option("--saliency-sigma", cfg.saliency.kernel_sigma,
                    "saliency pull-kernel sigma (normalized)");
    app->add_option("--saliency-radius", cfg.saliency.kernel_radius,
                    "saliency kernel truncation radius in nodes (0 = auto)");
    app->add_option("--seed", cfg.seed, "run seed");
    app->add_option("--jobs", cfg.jobs, "worker threads over scenes");
}

void finish_run_config(nuzoom::RunConfig& cfg, const DimsOption& proc,
                       const std::string& parametrization) {
    if (proc.height > 0) cfg.process_dims = {proc.height, proc.width};
    cfg.parametrization = parametrization == "saliency"
                              ? nuzoom::Parametrization::saliency
                              : nuzoom::Parametrization::offset;
}

int cmd_run(const fs::path& annotations, const fs::path& images_dir,
            const nuzoom::RunConfig& cfg) {
    nuzoom::IngestResult ingest;
    try {
        ingest = nuzoom::ingest_annotations(
            annotations, images_dir.empty()
                             ? std::nullopt
                             : std::optional<fs::path>(images_dir));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    for (const std::string& w : ingest.warnings)
        std::cerr << "warning: " << w << "\n";

    nuzoom::RunSummary summary;
    try {
        summary = nuzoom::run_pipeline(ingest.scenes, cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    for (const nuzoom::SceneOutcome& s : summary.scenes)
        if (s.status == nuzoom::SceneStatus::failed)
            std::cerr << "scene " << s.scene_id << " failed: " << s.message
                      << "\n";
    std::cout << "scenes: " << summary.ok_count << " ok, "
              << summary.skipped_count << " skipped, " << summary.failed_count
              << " failed\n"
              << "report: " << (cfg.output_dir / "run_report.json").string()
              << "\n";
    return summary.failed_count > 0 ? 1 : 0;
}

int cmd_synth(const nuzoom::SynthConfig& cfg, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    std::vector<nuzoom::SynthScene> scenes = nuzoom::synth_scenes(cfg);
    std::vector<nuzoom::Scene> annotations;
    int truncated = 0;
    for (nuzoom::SynthScene& s : scenes) {
        if (s.placement_truncated) ++truncated;
        if (cfg.make_images) {
            char name[32];
            std::snprintf(name, sizeof name, "scene_%06d.pgm", s.scene.id);
            const fs::path p = out_dir / name;
            nuzoom::write_netpbm(s.image, p);
            s.scene.image_path = p;
        }
        annotations.push_back(s.scene);
    }
    nuzoom::write_annotations(annotations, out_dir / "annotations.json");
    std::cout << "wrote " << annotations.size() << " scenes to "
              << out_dir.string();
    if (truncated > 0) std::cout << " (" << truncated << " truncated)";
    std::cout << "\n";
    return 0;
}

int cmd_check_gradients(int instances, int max_dim, uint64_t seed,
                        double step) {
    using namespace nuzoom;
    double worst = 0.0;
    for (int k = 0; k < instances; ++k) {
        Rng rng(mix_seed(seed, static_cast<uint64_t>(k)));
        const int h = 8 + rng.uniform_int(0, std::max(0, max_dim - 8));
        const int w = 8 + rng.uniform_int(0, std::max(0, max_dim - 8));
        const GridDims dims{h, w};
        const int n_boxes = rng.uniform_int(1, 5);
        std::vector<BBox> boxes;
        for (int b = 0; b < n_boxes; ++b) {
            const double bw = rng.uniform(0.08, 0.35);
            const double bh = rng.uniform(0.08, 0.35);
            const double x = rng.uniform(0.02, 0.95 - bw);
            const double y = rng.uniform(0.02, 0.95 - bh);
            boxes.push_back(make_bbox(x, y, x + bw, y + bh));
        }
        OffsetField offsets = zero_offsets(dims);
        for (double& v : offsets.dx.data()) v = 0.05 * rng.normal();
        for (double& v : offsets.dy.data()) v = 0.05 * rng.normal();
        ZoomLossConfig loss;
        loss.reg_weight = k % 2 == 0 ? 1e-3 : 0.0;
        const GradCheckReport report = finite_diff_check(
            boxes, make_uniform_grid(dims), offsets, loss, step);
        worst = std::max(worst, report.max_rel_error);
    }
    std::printf("%d instances, max relative error %.3e\n", instances, worst);
    return worst < 1e-4 ? 0 : 1;
}

int cmd_verify_bound(int samples, uint64_t seed) {
    using namespace nuzoom;
    Rng rng(seed);
    int violations = 0;
    for (int k = 0; k < samples; ++k) {
        const double w = rng.uniform(0.02, 0.5);
        const double h = rng.uniform(0.02, 0.5);
        const double tau_max = w * h / std::sqrt(w * w + h * h);
        const double tau = rng.uniform(0.0, 0.95 * tau_max);
        const double theta = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
        const double x = rng.uniform(0.0, 1.0 - w);
        const double y = rng.uniform(0.0, 1.0 - h);
        const BBox box = make_bbox(x, y, x + w, y + h);
        BBox moved = box;
        moved.c1.x += tau * std::cos(theta);
        moved.c2.x += tau * std::cos(theta);
        moved.c1.y += tau * std::sin(theta);
        moved.c2.y += tau * std::sin(theta);
        const double measured = iou(box, moved);
        const IouBound bound = iou_lower_bound(w, h, tau);
        if (measured < bound.exact - 1e-12) ++violations;
    }
    std::printf("%d instances, %d bound violations\n", samples, violations);
    return violations == 0 ? 0 : 1;
}

int cmd_compare(const nuzoom::SynthConfig& synth_cfg, nuzoom::RunConfig cfg,
                const fs::path& out_dir) {
    using nlohmann::ordered_json;
    std::vector<nuzoom::SynthScene> generated = nuzoom::synth_scenes(synth_cfg);
    std::vector<nuzoom::Scene> scenes;
    for (nuzoom::SynthScene& s : generated) scenes.push_back(s.scene);

    ordered_json comparison;
    for (const char* mode : {"offset", "saliency"}) {
        cfg.parametrization = std::string(mode) == "offset"
                                  ? nuzoom::Parametrization::offset
                                  : nuzoom::Parametrization::saliency;
        cfg.output_dir = out_dir / mode;
        const nuzoom::RunSummary summary = nuzoom::run_pipeline(scenes, cfg);

        double iou_sum = 0.0, var_in_sum = 0.0, zr_sum = 0.0;
        int boxes = 0, ok = 0;
        for (const nuzoom::SceneOutcome& s : summary.scenes) {
            if (s.status != nuzoom::SceneStatus::ok) continue;
            ++ok;
            var_in_sum += s.report.distortion.var_in;
            for (const nuzoom::BoxRecord& r : s.report.boxes) {
                iou_sum += r.roundtrip_iou;
                zr_sum += r.zr_area;
                ++boxes;
            }
        }
        ordered_json entry;
        entry["scenes_ok"] = ok;
        entry["boxes"] = boxes;
        if (boxes > 0) {
            entry["mean_roundtrip_iou"] = iou_sum / boxes;
            entry["mean_zr"] = zr_sum / boxes;
        }
        if (ok > 0) entry["mean_in_box_det_variance"] = var_in_sum / ok;
        comparison[mode] = std::move(entry);
    }
    fs::create_directories(out_dir);
    std::ofstream out(out_dir / "comparison.json", std::ios::binary);
    out << comparison.dump(2) << "\n";
    std::cout << comparison.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive non-uniform image zooming with box transformation"};
    app.require_subcommand(1);

    // run
    nuzoom::RunConfig run_cfg;
    DimsOption run_proc;
    std::string run_param = "offset";
    fs::path run_annotations, run_images_dir, run_out;
    CLI::App* run = app.add_subcommand("run", "process an annotated scene set");
    run->add_option("--annotations", run_annotations, "annotation JSON file")
        ->required();
    run->add_option("--images-dir", run_images_dir,
                    "directory holding the referenced images");
    run->add_option("--out", run_out, "output directory")->required();
    add_run_options(run, run_cfg, run_proc, run_param);

    // synth
    nuzoom::SynthConfig synth_cfg;
    synth_cfg.seed = nuzoom::kDefaultSeed;
    DimsOption synth_canvas;
    std::string synth_profile = "small-heavy";
    fs::path synth_out;
    bool synth_no_images = false;
    CLI::App* synth =
        app.add_subcommand("synth", "generate synthetic annotated scenes");
    synth->add_option("--out", synth_out, "output directory")->required();
    synth->add_option("--count", synth_cfg.count, "number of scenes");
    synth->add_option("--seed", synth_cfg.seed, "generator seed");
    add_dims_option(synth, "--canvas", synth_canvas, "canvas resolution");
    synth->add_option("--boxes", synth_cfg.boxes_per_scene, "boxes per scene");
    synth->add_option("--min-box", synth_cfg.min_box_px, "min box side, px");
    synth->add_option("--max-box", synth_cfg.max_box_px, "max box side, px");
    synth->add_option("--profile", synth_profile,
                      "box size profile: small-heavy or mixed")
        ->check(CLI::IsMember({"small-heavy", "mixed"}));
    synth->add_option("--max-overlap", synth_cfg.max_overlap_iou,
                      "max allowed pairwise IoU between boxes");
    synth->add_flag("--no-images", synth_no_images,
                    "emit annotations only, no rendered images");

    // check-gradients
    int cg_instances = 100, cg_max_dim = 64;
    uint64_t cg_seed = nuzoom::kDefaultSeed;
    double cg_step = 1e-5;
    CLI::App* cg = app.add_subcommand(
        "check-gradients", "audit analytic gradients with finite differences");
    cg->add_option("--instances", cg_instances, "random instances");
    cg->add_option("--max-dim", cg_max_dim, "max grid dimension");
    cg->add_option("--seed", cg_seed, "seed");
    cg->add_option("--step", cg_step, "finite-difference step");

    // verify-bound
    int vb_samples = 10000;
    uint64_t vb_seed = nuzoom::kDefaultSeed;
    CLI::App* vb = app.add_subcommand(
        "verify-bound", "check the roundtrip IoU lower bound on random boxes");
    vb->add_option("--samples", vb_samples, "random instances");
    vb->add_option("--seed", vb_seed, "seed");

    // compare-parametrizations
    nuzoom::RunConfig cmp_cfg;
    DimsOption cmp_proc;
    std::string cmp_param = "offset";
    nuzoom::SynthConfig cmp_synth;
    cmp_synth.seed = nuzoom::kDefaultSeed;
    cmp_synth.count = 8;
    cmp_synth.make_images = false;
    fs::path cmp_out;
    CLI::App* cmp = app.add_subcommand(
        "compare-parametrizations",
        "run the offset and saliency parametrizations on the same scenes");
    cmp->add_option("--out", cmp_out, "output directory")->required();
    cmp->add_option("--count", cmp_synth.count, "synthetic scenes to use");
    cmp->add_option("--synth-seed", cmp_synth.seed, "scene generator seed");
    add_run_options(cmp, cmp_cfg, cmp_proc, cmp_param);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            finish_run_config(run_cfg, run_proc, run_param);
            run_cfg.output_dir = run_out;
            return cmd_run(run_annotations, run_images_dir, run_cfg);
        }
        if (synth->parsed()) {
            if (synth_canvas.height > 0)
                synth_cfg.canvas = {synth_canvas.height, synth_canvas.width};
            synth_cfg.profile = synth_profile == "mixed"
                                    ? nuzoom::SizeProfile::mixed
                                    : nuzoom::SizeProfile::small_heavy;
            synth_cfg.make_images = !synth_no_images;
            return cmd_synth(synth_cfg, synth_out);
        }
        if (cg->parsed())
            return cmd_check_gradients(cg_instances, cg_max_dim, cg_seed,
                                       cg_step);
        if (vb->parsed()) return cmd_verify_bound(vb_samples, vb_seed);
        if (cmp->parsed()) {
            finish_run_config(cmp_cfg, cmp_proc, cmp_param);
            return cmd_compare(cmp_synth, cmp_cfg, cmp_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
