// Copyright (c) 2026 The nuzoom Authors.
// Licensed under the Apache License, Version 2.0.

#include "nuzoom/offset_io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nuzoom {

namespace {

constexpr char kMagic[] = "offset-field v1";

void append_f32_le(std::string& out, float value) {
    const uint32_t bits = std::bit_cast<uint32_t>(value);
    out.push_back(static_cast<char>(bits & 0xff));
    out.push_back(static_cast<char>((bits >> 8) & 0xff));
    out.push_back(static_cast<char>((bits >> 16) & 0xff));
    out.push_back(static_cast<char>((bits >> 24) & 0xff));
}

float read_f32_le(const unsigned char* p) {
    const uint32_t bits = static_cast<uint32_t>(p[0]) |
                          (static_cast<uint32_t>(p[1]) << 8) |
                          (static_cast<uint32_t>(p[2]) << 16) |
                          (static_cast<uint32_t>(p[3]) << 24);
    return std::bit_cast<float>(bits);
}

} // namespace

void save_offset_field(const OffsetField& field, double scale,
                       const std::filesystem::path& path) {
    if (!field.dims().valid())
        throw std::invalid_argument("save_offset_field: dims must be >= 2x2");
    const GridDims d = field.dims();
    char scale_text[32];
    std::snprintf(scale_text, sizeof scale_text, "%.17g", scale);

    std::string out;
    out += kMagic;
    out += "\ndims ";
    out += std::to_string(d.height) + " " + std::to_string(d.width);
    out += "\nscale ";
    out += scale_text;
    out += "\nendian little\ndtype f32\ndata\n";
    for (double v : field.dx.data()) append_f32_le(out, static_cast<float>(v));
    for (double v : field.dy.data()) append_f32_le(out, static_cast<float>(v));

    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("save_offset_field: cannot write " +
                                 path.string());
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
}

LoadedOffsetField load_offset_field(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("load_offset_field: cannot open " +
                                 path.string());
    std::string line;
    auto next_line = [&]() {
        if (!std::getline(f, line))
            throw std::runtime_error("load_offset_field: truncated header");
        return line;
    };
    if (next_line() != kMagic)
        throw std::runtime_error("load_offset_field: bad magic in " +
                                 path.string());
    LoadedOffsetField result;
    GridDims dims;
    {
        std::istringstream ss(next_line());
        std::string key;
        ss >> key >> dims.height >> dims.width;
        if (key != "dims" || !dims.valid())
            throw std::runtime_error("load_offset_field: bad dims line");
    }
    {
        std::istringstream ss(next_line());
        std::string key;
        ss >> key >> result.scale;
        if (key != "scale")
            throw std::runtime_error("load_offset_field: bad scale line");
    }
    if (next_line() != "endian little" || next_line() != "dtype f32" ||
        next_line() != "data")
        throw std::runtime_error("load_offset_field: unsupported layout");

    const size_t n = static_cast<size_t>(dims.node_count());
    std::vector<unsigned char> payload(n * 2 * 4);
    f.read(reinterpret_cast<char*>(payload.data()),
           static_cast<std::streamsize>(payload.size()));
    if (static_cast<size_t>(f.gcount()) != payload.size())
        throw std::runtime_error("load_offset_field: truncated payload");

    result.field = zero_offsets(dims);
    for (size_t k = 0; k < n; ++k)
        result.field.dx.data()[k] = read_f32_le(&payload[k * 4]);
    for (size_t k = 0; k < n; ++k)
        result.field.dy.data()[k] = read_f32_le(&payload[(n + k) * 4]);
    return result;
}

} // namespace nuzoom
