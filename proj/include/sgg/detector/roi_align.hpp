#pragma once

#include <algorithm>
#include <cmath>

#include "sgg/core/errors.hpp"
#include "sgg/detector/feature_map.hpp"

namespace sgg::det {

// Standard area heuristic mapping a box to one of the three pyramid levels:
// level = clamp(floor(log2(sqrt(area) / canonical) + 3), 3, 5).
inline int assign_pyramid_level(const BoundingBox& box, double canonical = 56.0) {
    const double area = box.area();
    if (!(area > 0.0)) throw DataError("roi_align: degenerate box");
    const int lvl = static_cast<int>(std::floor(std::log2(std::sqrt(area) / canonical) + 3.0));
    return std::clamp(lvl, 3, 5);
}

namespace detail {

// Bilinear sample at continuous grid coordinates, clamped at the borders.
inline void bilinear_row(const FeatureMap& m, double gx, double gy, Eigen::RowVectorXd& out) {
    gx = std::clamp(gx, 0.0, static_cast<double>(m.w - 1));
    gy = std::clamp(gy, 0.0, static_cast<double>(m.h - 1));
    const int x0 = std::min(static_cast<int>(gx), m.w - 1);
    const int y0 = std::min(static_cast<int>(gy), m.h - 1);
    const int x1 = std::min(x0 + 1, m.w - 1);
    const int y1 = std::min(y0 + 1, m.h - 1);
    const double fx = gx - x0, fy = gy - y0;
    out = (1 - fy) * ((1 - fx) * m.data.row(y0 * m.w + x0) + fx * m.data.row(y0 * m.w + x1)) +
          fy * ((1 - fx) * m.data.row(y1 * m.w + x0) + fx * m.data.row(y1 * m.w + x1));
}

}  // namespace detail

// Pools an S x S grid from one pyramid level with a single bilinear sample at
// each bin center. Grid cell (ix, iy) covers the image-space square
// [ix*stride, (ix+1)*stride), so image point p maps to grid coordinate
// p/stride - 0.5. Output is flattened bin-major: index (i*S + j)*C + c.
inline Vec roi_align_pool(const FeatureMap& map, int stride, const BoundingBox& box, int S) {
    if (!(box.area() > 0.0)) throw DataError("roi_align: degenerate box");
    const int C = map.channels();
    Vec out(static_cast<Eigen::Index>(S) * S * C);
    Eigen::RowVectorXd sample(C);
    const double bw = box.width() / S, bh = box.height() / S;
    for (int i = 0; i < S; ++i) {
        const double sy = box.y1 + (i + 0.5) * bh;
        for (int j = 0; j < S; ++j) {
            const double sx = box.x1 + (j + 0.5) * bw;
            detail::bilinear_row(map, sx / stride - 0.5, sy / stride - 0.5, sample);
            out.segment(static_cast<Eigen::Index>(i * S + j) * C, C) = sample.transpose();
        }
    }
    return out;
}

// Fixed (seeded, untrained) linear map from the flattened pooled grid down to
// the D_vis visual feature the relation head consumes.
struct RoiProjector {
    int pool_size = 7;
    Mat W;  // d_vis x (C * S * S)
    Vec b;

    static RoiProjector init(int channels, int pool_size, int d_vis, Rng& rng) {
        RoiProjector p;
        p.pool_size = pool_size;
        const int in_dim = channels * pool_size * pool_size;
        p.W = random_init(d_vis, in_dim, in_dim, rng);
        p.b = Vec::Zero(d_vis);
        return p;
    }

    Vec project(const Vec& pooled) const { return W * pooled + b; }

    std::size_t param_count() const { return static_cast<std::size_t>(W.size() + b.size()); }
};

// Level selection + pooling + projection for one box.
inline Vec pooled_feature(const FeaturePyramid& pyr, const BoundingBox& box,
                          const RoiProjector& proj, double canonical = 56.0) {
    const int lvl = assign_pyramid_level(box, canonical);
    return proj.project(
        roi_align_pool(pyr.level(lvl), FeaturePyramid::stride_of(lvl), box, proj.pool_size));
}

}  // namespace sgg::det
