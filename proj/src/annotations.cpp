// Copyright (c) 2026 The nuzoom Authors.
// Licensed under the Apache License, Version 2.0.

#include "nuzoom/annotations.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "nuzoom/image_io.hpp"

namespace nuzoom {

using ordered_json = nlohmann::ordered_json;

IngestResult ingest_annotations(
    const std::filesystem::path& path,
    const std::optional<std::filesystem::path>& images_dir) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("ingest_annotations: cannot open " +
                                 path.string());
    ordered_json root;
    try {
        root = ordered_json::parse(in);
    } catch (const std::exception& e) {
        throw std::runtime_error("ingest_annotations: invalid JSON in " +
                                 path.string() + ": " + e.what());
    }

    IngestResult result;
    std::map<int, size_t> scene_of_image;
    if (!root.contains("images") || !root["images"].is_array())
        throw std::runtime_error(
            "ingest_annotations: missing 'images' array");

    size_t idx = 0;
    for (const ordered_json& img : root["images"]) {
        const std::string where = "image record " + std::to_string(idx++);
        if (!img.contains("id") || !img.contains("width") ||
            !img.contains("height"))
            throw std::runtime_error("ingest_annotations: " + where +
                                     ": needs id, width, height");
        Scene scene;
        scene.id = img["id"].get<int>();
        scene.image_dims = {img["height"].get<int>(), img["width"].get<int>()};
        if (scene.image_dims.height < 1 || scene.image_dims.width < 1)
            throw std::runtime_error("ingest_annotations: " + where +
                                     ": non-positive dims");
        if (img.contains("file_name") && images_dir) {
            const std::filesystem::path p =
                *images_dir / img["file_name"].get<std::string>();
            if (std::filesystem::exists(p)) {
                const GridDims on_disk = read_netpbm_dims(p);
                if (!(on_disk == scene.image_dims))
                    throw std::runtime_error(
                        "ingest_annotations: " + where + ": file " +
                        p.string() + " dims disagree with the annotation");
                scene.image_path = p;
            }
        }
        if (scene_of_image.count(scene.id))
            throw std::runtime_error("ingest_annotations: " + where +
                                     ": duplicate image id");
        scene_of_image[scene.id] = result.scenes.size();
        result.scenes.push_back(std::move(scene));
    }

    idx = 0;
    if (root.contains("annotations")) {
        for (const ordered_json& ann : root["annotations"]) {
            const std::string where = "annotation " + std::to_string(idx++);
            if (!ann.contains("image_id") || !ann.contains("bbox") ||
                !ann["bbox"].is_array() || ann["bbox"].size() != 4)
                throw std::runtime_error("ingest_annotations: " + where +
                                         ": needs image_id and bbox[4]");
            const int image_id = ann["image_id"].get<int>();
            const auto it = scene_of_image.find(image_id);
            if (it == scene_of_image.end())
                throw std::runtime_error("ingest_annotations: " + where +
                                         ": unknown image_id " +
                                         std::to_string(image_id));
            Scene& scene = result.scenes[it->second];
            const double x = ann["bbox"][0].get<double>();
            const double y = ann["bbox"][1].get<double>();
            const double w = ann["bbox"][2].get<double>();
            const double h = ann["bbox"][3].get<double>();
            if (!(w > 0.0) || !(h > 0.0)) {
                result.warnings.push_back(where + ": zero-area box rejected");
                continue;
            }
            const double W = scene.image_dims.width;
            const double H = scene.image_dims.height;
            BBox box{{x / W, y / H}, {(x + w) / W, (y + h) / H},
                     BoxSpace::original};
            box.c1.x = std::clamp(box.c1.x, 0.0, 1.0);
            box.c1.y = std::clamp(box.c1.y, 0.0, 1.0);
            box.c2.x = std::clamp(box.c2.x, 0.0, 1.0);
            box.c2.y = std::clamp(box.c2.y, 0.0, 1.0);
            if (!box.valid()) {
                result.warnings.push_back(where +
                                          ": box outside the image rejected");
                continue;
            }
            SceneBox sb{box, ann.contains("category_id")
                                 ? ann["category_id"].get<int>()
                                 : 0};
            scene.boxes.push_back(sb);
        }
    }

    for (const Scene& s : result.scenes)
        if (s.boxes.empty())
            result.warnings.push_back("image " + std::to_string(s.id) +
                                      ": no boxes; the solver will skip it");
    return result;
}

std::string emit_annotations(const std::vector<Scene>& scenes,
                             std::optional<GridDims> space_dims) {
    ordered_json root;
    root["images"] = ordered_json::array();
    root["annotations"] = ordered_json::array();
    for (const Scene& s : scenes) {
        const GridDims dims = space_dims.value_or(s.image_dims);
        ordered_json img;
        img["id"] = s.id;
        img["width"] = dims.width;
        img["height"] = dims.height;
        if (s.image_path)
            img["file_name"] = s.image_path->filename().string();
        root["images"].push_back(std::move(img));
        for (const SceneBox& sb : s.boxes) {
            ordered_json ann;
            ann["image_id"] = s.id;
            ann["bbox"] = {sb.box.c1.x * dims.width, sb.box.c1.y * dims.height,
                           sb.box.width() * dims.width,
                           sb.box.height() * dims.height};
            ann["category_id"] = sb.category_id;
            root["annotations"].push_back(std::move(ann));
        }
    }
    return root.dump(2) + "\n";
}

void write_annotations(const std::vector<Scene>& scenes,
                       const std::filesystem::path& path,
                       std::optional<GridDims> space_dims) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("write_annotations: cannot write " +
                                 path.string());
    out << emit_annotations(scenes, space_dims);
}

} // namespace nuzoom
