// Copyright (c) 2026 The nuzoom Authors.
// Licensed under the Apache License, Version 2.0.

#ifndef NUZOOM_ANNOTATIONS_HPP
#define NUZOOM_ANNOTATIONS_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nuzoom/bbox.hpp"

namespace nuzoom {

struct SceneBox {
    BBox box; // normalized, original space
    int category_id = 0;
};

struct Scene {
    int id = 0;
    GridDims image_dims;                            // native pixels
    std::optional<std::filesystem::path> image_path; // absent: annotation-only
    std::vector<SceneBox> boxes;
};

struct IngestResult {
    std::vector<Scene> scenes;
    std::vector<std::string> warnings; // rejected records, empty scenes
};

/// Reads the annotation file: {"images":[{id,width,height,file_name?}],
/// "annotations":[{image_id,bbox:[x,y,w,h] in pixels,category_id}]}. Boxes
/// are normalized to corner form by the image dims; zero-area boxes are
/// rejected with a warning. When `images_dir` is given, referenced image
/// files are located there and their header dims must match the declared
/// ones. Malformed records raise std::runtime_error naming the index.
IngestResult ingest_annotations(
    const std::filesystem::path& path,
    const std::optional<std::filesystem::path>& images_dir = std::nullopt);

/// Inverse of ingest: boxes back to pixel [x, y, width, height].
/// `space_dims` overrides the per-scene dims (used for zoomed-space output
/// at the processing resolution).
std::string emit_annotations(const std::vector<Scene>& scenes,
                             std::optional<GridDims> space_dims = std::nullopt);

void write_annotations(const std::vector<Scene>& scenes,
                       const std::filesystem::path& path,
                       std::optional<GridDims> space_dims = std::nullopt);

} // namespace nuzoom

#endif // NUZOOM_ANNOTATIONS_HPP
