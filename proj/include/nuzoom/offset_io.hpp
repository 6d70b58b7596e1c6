// Copyright (c) 2026 The nuzoom Authors.
// Licensed under the Apache License, Version 2.0.

#ifndef NUZOOM_OFFSET_IO_HPP
#define NUZOOM_OFFSET_IO_HPP

#include <filesystem>

#include "nuzoom/geometry.hpp"

namespace nuzoom {

/// Offset-field file: a text header (dims, scale, endianness, dtype)
/// followed by row-major float32 little-endian payload, dx plane then dy
/// plane. Byte-exact across platforms.
void save_offset_field(const OffsetField& field, double scale,
                       const std::filesystem::path& path);

struct LoadedOffsetField {
    OffsetField field;
    double scale = 1.0;
};

LoadedOffsetField load_offset_field(const std::filesystem::path& path);

} // namespace nuzoom

#endif // NUZOOM_OFFSET_IO_HPP
