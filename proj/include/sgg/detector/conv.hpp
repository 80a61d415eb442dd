#pragma once

#include "sgg/detector/feature_map.hpp"

namespace sgg::det {

// 3x3 convolution, padding 1, stride 1 or 2. With padding 1 and stride 2 the
// output size is exactly ceil(n/2), which keeps pyramid shapes at
// ceil(H/stride) x ceil(W/stride) through the stem.
struct Conv3x3 {
    int in_c = 0;
    int out_c = 0;
    int stride = 1;
    bool relu = false;
    Mat W;  // out_c x (9 * in_c), kernel-major: (ky*3+kx)*in_c + ic
    Vec b;  // out_c

    static Conv3x3 init(int in_c, int out_c, int stride, bool relu, Rng& rng) {
        Conv3x3 conv;
        conv.in_c = in_c;
        conv.out_c = out_c;
        conv.stride = stride;
        conv.relu = relu;
        conv.W = random_init(out_c, 9 * in_c, 9 * in_c, rng, relu ? std::sqrt(2.0) : 1.0);
        // small nonzero bias keeps ReLU pre-activations off the exact kink
        conv.b = random_init(out_c, 1, 1, rng, 0.01).col(0);
        return conv;
    }

    static int out_size(int n, int stride) { return (n - 1) / stride + 1; }

    Mat im2col(const FeatureMap& x) const {
        const int oh = out_size(x.h, stride), ow = out_size(x.w, stride);
        Mat cols = Mat::Zero(static_cast<Eigen::Index>(oh) * ow, 9 * in_c);
        for (int oy = 0; oy < oh; ++oy) {
            for (int ox = 0; ox < ow; ++ox) {
                const int row = oy * ow + ox;
                for (int ky = 0; ky < 3; ++ky) {
                    const int iy = oy * stride + ky - 1;
                    if (iy < 0 || iy >= x.h) continue;
                    for (int kx = 0; kx < 3; ++kx) {
                        const int ix = ox * stride + kx - 1;
                        if (ix < 0 || ix >= x.w) continue;
                        cols.block(row, (ky * 3 + kx) * in_c, 1, in_c) =
                            x.data.row(iy * x.w + ix);
                    }
                }
            }
        }
        return cols;
    }

    FeatureMap forward(const FeatureMap& x) const {
        FeatureMap y;
        y.h = out_size(x.h, stride);
        y.w = out_size(x.w, stride);
        y.data = im2col(x) * W.transpose();
        y.data.rowwise() += b.transpose();
        if (relu) y.data = y.data.cwiseMax(0.0);
        return y;
    }

    // Backward pass given the forward input and output. Accumulates parameter
    // gradients into dW/db and returns the gradient w.r.t. the input map.
    FeatureMap backward(const FeatureMap& x, const FeatureMap& y, const Mat& dy_in,
                        Mat& dW, Vec& db) const {
        Mat dy = dy_in;
        if (relu) dy = (y.data.array() > 0.0).select(dy, 0.0);

        const Mat cols = im2col(x);
        dW += dy.transpose() * cols;
        db += dy.colwise().sum().transpose();

        const Mat dcols = dy * W;
        FeatureMap dx = FeatureMap::zeros(x.h, x.w, in_c);
        const int oh = y.h, ow = y.w;
        for (int oy = 0; oy < oh; ++oy) {
            for (int ox = 0; ox < ow; ++ox) {
                const int row = oy * ow + ox;
                for (int ky = 0; ky < 3; ++ky) {
                    const int iy = oy * stride + ky - 1;
                    if (iy < 0 || iy >= x.h) continue;
                    for (int kx = 0; kx < 3; ++kx) {
                        const int ix = ox * stride + kx - 1;
                        if (ix < 0 || ix >= x.w) continue;
                        dx.data.row(iy * x.w + ix) +=
                            dcols.block(row, (ky * 3 + kx) * in_c, 1, in_c);
                    }
                }
            }
        }
        return dx;
    }

    std::size_t param_count() const { return static_cast<std::size_t>(W.size() + b.size()); }
};

}  // namespace sgg::det
