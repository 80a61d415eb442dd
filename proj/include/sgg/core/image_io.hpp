#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "sgg/core/errors.hpp"
#include "sgg/core/types.hpp"

namespace sgg {

// Binary PPM (P6, maxval 255) is the only pixel format in the toolkit.
// Values are stored as bytes and mapped to [0,1] on load; synthetic scenes
// use byte-exact colors so write/read round-trips exactly.

inline void write_ppm(const Image& img, const std::filesystem::path& path) {
    if (img.channels != 3) throw DataError("write_ppm: image must have 3 channels");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write image file: " + path.string());
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < 3; ++c) {
                const double v = std::clamp(img.at(y, x, c), 0.0, 1.0);
                out.put(static_cast<char>(std::lround(v * 255.0)));
            }
}

inline Image read_ppm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingArtifactError("cannot open image file: " + path.string());
    std::string magic;
    int w = 0, h = 0, maxval = 0;
    in >> magic >> w >> h >> maxval;
    if (magic != "P6" || maxval != 255 || w <= 0 || h <= 0)
        throw DataError("unsupported PPM file: " + path.string());
    in.get();  // single whitespace after header

    Image img = Image::filled(w, h, 3, 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 3; ++c) {
                const int byte = in.get();
                if (byte < 0) throw DataError("truncated PPM file: " + path.string());
                img.at(y, x, c) = byte / 255.0;
            }
    return img;
}

}  // namespace sgg
