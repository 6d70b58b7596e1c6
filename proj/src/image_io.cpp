// Copyright (c) 2026 The nuzoom Authors.
// Licensed under the Apache License, Version 2.0.

#include "nuzoom/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace nuzoom {

namespace {

int next_pnm_token(std::istream& in) {
    // Skips whitespace and '#' comments, returns a non-negative integer.
    for (;;) {
        int c = in.peek();
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            break;
        }
    }
    int value = 0;
    if (!(in >> value) || value < 0)
        throw std::runtime_error("netpbm: malformed header");
    return value;
}

struct PnmHeader {
    int channels = 1;
    GridDims dims;
    int maxval = 255;
};

PnmHeader read_header(std::istream& in, const std::filesystem::path& path) {
    char magic[2] = {0, 0};
    in.read(magic, 2);
    PnmHeader h;
    if (magic[0] == 'P' && magic[1] == '5')
        h.channels = 1;
    else if (magic[0] == 'P' && magic[1] == '6')
        h.channels = 3;
    else
        throw std::runtime_error("netpbm: " + path.string() +
                                 " is not a binary PGM/PPM file");
    h.dims.width = next_pnm_token(in);
    h.dims.height = next_pnm_token(in);
    h.maxval = next_pnm_token(in);
    if (h.maxval <= 0 || h.maxval > 255)
        throw std::runtime_error("netpbm: only 8-bit files are supported");
    in.get(); // single whitespace before the payload
    return h;
}

} // namespace

GridDims read_netpbm_dims(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("netpbm: cannot open " + path.string());
    return read_header(in, path).dims;
}

Image read_netpbm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("netpbm: cannot open " + path.string());
    const PnmHeader h = read_header(in, path);
    if (!h.dims.valid())
        throw std::runtime_error("netpbm: image smaller than 2x2");
    Image img = make_image(h.dims, h.channels);
    const size_t n =
        static_cast<size_t>(h.dims.node_count()) * h.channels;
    std::vector<unsigned char> bytes(n);
    in.read(reinterpret_cast<char*>(bytes.data()),
            static_cast<std::streamsize>(n));
    if (static_cast<size_t>(in.gcount()) != n)
        throw std::runtime_error("netpbm: truncated payload in " +
                                 path.string());
    size_t p = 0;
    for (int i = 0; i < h.dims.height; ++i)
        for (int j = 0; j < h.dims.width; ++j)
            for (int c = 0; c < h.channels; ++c)
                img.channels[c](i, j) =
                    static_cast<double>(bytes[p++]) / h.maxval;
    return img;
}

void write_netpbm(const Image& image, const std::filesystem::path& path) {
    const int ch = image.channel_count();
    if (ch != 1 && ch != 3)
        throw std::invalid_argument("netpbm: only 1 or 3 channels supported");
    const GridDims d = image.dims();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("netpbm: cannot write " + path.string());
    out << (ch == 1 ? "P5" : "P6") << "\n"
        << d.width << " " << d.height << "\n255\n";
    std::vector<unsigned char> bytes;
    bytes.reserve(static_cast<size_t>(d.node_count()) * ch);
    for (int i = 0; i < d.height; ++i)
        for (int j = 0; j < d.width; ++j)
            for (int c = 0; c < ch; ++c) {
                const double v = std::clamp(image.channels[c](i, j), 0.0, 1.0);
                bytes.push_back(
                    static_cast<unsigned char>(std::lround(v * 255.0)));
            }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

} // namespace nuzoom
