#pragma once

#include <Eigen/Core>

#include "sgg/core/rng.hpp"

namespace sgg {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// He-style init for layers followed by ReLU; also used as a generic scaled
// normal init for linear projections.
inline Mat random_init(int rows, int cols, int fan_in, Rng& rng, double gain = 1.0) {
    Mat m(rows, cols);
    const double scale = gain / std::sqrt(static_cast<double>(fan_in));
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = rng.normal() * scale;
    return m;
}

}  // namespace sgg
