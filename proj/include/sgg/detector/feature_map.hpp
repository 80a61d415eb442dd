#pragma once

#include <array>

#include "sgg/core/linalg.hpp"
#include "sgg/core/types.hpp"

namespace sgg::det {

// Dense feature grid. Rows are pixels in y-major order, columns are channels,
// which makes convolution an im2col matrix product.
struct FeatureMap {
    int h = 0;
    int w = 0;
    Mat data;  // (h*w) x c

    int channels() const { return static_cast<int>(data.cols()); }

    double at(int y, int x, int c) const { return data(y * w + x, c); }
    double& at(int y, int x, int c) { return data(y * w + x, c); }

    static FeatureMap zeros(int h, int w, int c) {
        FeatureMap m;
        m.h = h;
        m.w = w;
        m.data = Mat::Zero(h * w, c);
        return m;
    }

    static FeatureMap from_image(const Image& img) {
        FeatureMap m = zeros(img.height, img.width, img.channels);
        for (int y = 0; y < img.height; ++y)
            for (int x = 0; x < img.width; ++x)
                for (int c = 0; c < img.channels; ++c) m.at(y, x, c) = img.at(y, x, c);
        return m;
    }
};

// Three scales, strides 8/16/32, shared channel count after unification.
struct FeaturePyramid {
    static constexpr std::array<int, 3> kStrides = {8, 16, 32};

    FeatureMap p3;
    FeatureMap p4;
    FeatureMap p5;

    const FeatureMap& level(int lvl) const {
        switch (lvl) {
            case 3: return p3;
            case 4: return p4;
            default: return p5;
        }
    }
    static int stride_of(int lvl) { return kStrides[lvl - 3]; }
};

}  // namespace sgg::det
