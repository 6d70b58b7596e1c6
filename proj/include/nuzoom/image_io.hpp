// Copyright (c) 2026 The nuzoom Authors.
// Licensed under the Apache License, Version 2.0.

#ifndef NUZOOM_IMAGE_IO_HPP
#define NUZOOM_IMAGE_IO_HPP

#include <filesystem>

#include "nuzoom/warp.hpp"

namespace nuzoom {

/// Binary netpbm, 8-bit: PGM (P5) for one channel, PPM (P6) for three.
/// Values are mapped between [0,1] doubles and [0,255] bytes.
Image read_netpbm(const std::filesystem::path& path);
void write_netpbm(const Image& image, const std::filesystem::path& path);

/// Reads only the header; dims without decoding the payload.
GridDims read_netpbm_dims(const std::filesystem::path& path);

} // namespace nuzoom

#endif // NUZOOM_IMAGE_IO_HPP
