#pragma once

#include <array>

#include "sgg/core/errors.hpp"
#include "sgg/detector/conv.hpp"
#include "sgg/detector/feature_map.hpp"

namespace sgg::det {

// Tiny stride-2 stem producing feature maps at strides 8/16/32, followed by
// one 3x3 conv block per level that unifies the channel count before ROI
// pooling.
struct Backbone {
    Conv3x3 c1, c2, c3, c4, c5;  // stride-2 stem, ReLU
    Conv3x3 u3, u4, u5;          // stride-1 unifying convs, linear

    static Backbone init(int in_channels, const std::array<int, 5>& stem,
                         int pyramid_channels, Rng& rng) {
        Backbone bb;
        bb.c1 = Conv3x3::init(in_channels, stem[0], 2, true, rng);
        bb.c2 = Conv3x3::init(stem[0], stem[1], 2, true, rng);
        bb.c3 = Conv3x3::init(stem[1], stem[2], 2, true, rng);
        bb.c4 = Conv3x3::init(stem[2], stem[3], 2, true, rng);
        bb.c5 = Conv3x3::init(stem[3], stem[4], 2, true, rng);
        bb.u3 = Conv3x3::init(stem[2], pyramid_channels, 1, false, rng);
        bb.u4 = Conv3x3::init(stem[3], pyramid_channels, 1, false, rng);
        bb.u5 = Conv3x3::init(stem[4], pyramid_channels, 1, false, rng);
        return bb;
    }

    // Intermediate activations kept for the training backward pass.
    struct Trace {
        FeatureMap x0, a1, a2, a3, a4, a5;
        FeaturePyramid pyramid;
    };

    Trace forward_trace(const Image& img) const {
        if (img.width < 32 || img.height < 32)
            throw DataError("extract_pyramid: unsupported image size (min 32x32)");
        Trace t;
        t.x0 = FeatureMap::from_image(img);
        t.x0.data.array() -= 0.5;  // center pixel values
        t.a1 = c1.forward(t.x0);
        t.a2 = c2.forward(t.a1);
        t.a3 = c3.forward(t.a2);
        t.a4 = c4.forward(t.a3);
        t.a5 = c5.forward(t.a4);
        t.pyramid.p3 = u3.forward(t.a3);
        t.pyramid.p4 = u4.forward(t.a4);
        t.pyramid.p5 = u5.forward(t.a5);
        return t;
    }

    FeaturePyramid forward(const Image& img) const { return forward_trace(img).pyramid; }
};

}  // namespace sgg::det
