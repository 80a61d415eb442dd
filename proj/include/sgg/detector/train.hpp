#pragma once

#include <numeric>
#include <vector>

#include "sgg/core/errors.hpp"
#include "sgg/detector/detector.hpp"

namespace sgg::det {

struct TrainLog {
    std::vector<double> epoch_losses;
};

// Per-cell training targets on P3. A cell is positive for a ground-truth box
// when its center falls in the central half-extent of that box; contested
// cells go to the smallest box so nested objects keep their own cells.
struct DetectorTargets {
    std::vector<int> cls;                      // [0..num_classes], background last
    std::vector<Eigen::RowVector4d> box;       // valid at positive cells
    std::vector<int> owner;                    // gt index or -1
    int num_positive = 0;
};

inline DetectorTargets assign_targets(const ImageRecord& rec, int h, int w, int stride,
                                      int num_classes) {
    DetectorTargets t;
    t.cls.assign(static_cast<std::size_t>(h) * w, num_classes);
    t.box.assign(static_cast<std::size_t>(h) * w, Eigen::RowVector4d::Zero());
    t.owner.assign(static_cast<std::size_t>(h) * w, -1);

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double cx = (x + 0.5) * stride;
            const double cy = (y + 0.5) * stride;
            int best = -1;
            for (std::size_t g = 0; g < rec.gt_boxes.size(); ++g) {
                const BoundingBox& b = rec.gt_boxes[g];
                if (std::abs(cx - b.center_x()) > 0.25 * b.width() ||
                    std::abs(cy - b.center_y()) > 0.25 * b.height())
                    continue;
                if (best < 0 || b.area() < rec.gt_boxes[best].area()) best = static_cast<int>(g);
            }
            if (best < 0) continue;
            const int cell = y * w + x;
            const BoundingBox& b = rec.gt_boxes[best];
            t.cls[cell] = rec.gt_classes[best];
            t.owner[cell] = best;
            t.box[cell] << (b.center_x() - cx) / stride, (b.center_y() - cy) / stride,
                std::log(b.width() / stride), std::log(b.height() / stride);
            ++t.num_positive;
        }
    }

    // Guarantee every object at least its center cell, smallest box winning.
    for (std::size_t g = 0; g < rec.gt_boxes.size(); ++g) {
        const BoundingBox& b = rec.gt_boxes[g];
        const int x = std::clamp(static_cast<int>(b.center_x() / stride), 0, w - 1);
        const int y = std::clamp(static_cast<int>(b.center_y() / stride), 0, h - 1);
        const int cell = y * w + x;
        if (t.owner[cell] >= 0 && rec.gt_boxes[t.owner[cell]].area() <= b.area()) continue;
        if (t.owner[cell] < 0) ++t.num_positive;
        const double cx = (x + 0.5) * stride, cy = (y + 0.5) * stride;
        t.cls[cell] = rec.gt_classes[g];
        t.owner[cell] = static_cast<int>(g);
        t.box[cell] << (b.center_x() - cx) / stride, (b.center_y() - cy) / stride,
            std::log(b.width() / stride), std::log(b.height() / stride);
    }
    return t;
}

// Gradient buffers aligned with DetectorModel::conv_layers() order.
struct DetectorGrads {
    std::vector<Mat> dW;
    std::vector<Vec> db;

    static DetectorGrads zeros_like(const DetectorModel& m) {
        DetectorGrads g;
        for (const auto& [name, conv] : m.conv_layers()) {
            (void)name;
            g.dW.push_back(Mat::Zero(conv->W.rows(), conv->W.cols()));
            g.db.push_back(Vec::Zero(conv->b.size()));
        }
        return g;
    }
};

// Class cross-entropy (positives up-weighted) plus box MSE at positive cells;
// no objectness term. Accumulates analytic gradients when grads != nullptr.
inline double detector_loss(const DetectorModel& model, const ImageRecord& rec,
                            DetectorGrads* grads = nullptr, double pos_weight = 24.0,
                            double box_weight = 2.0) {
    const auto trace = model.backbone.forward_trace(rec.image);
    const FeatureMap& p3 = trace.pyramid.p3;
    const FeatureMap cls_map = model.head_cls.forward(p3);
    const FeatureMap box_map = model.head_box.forward(p3);
    const int cells = p3.h * p3.w;
    const int num_cls = model.cfg.num_classes + 1;

    const DetectorTargets tgt =
        assign_targets(rec, p3.h, p3.w, FeaturePyramid::stride_of(3), model.cfg.num_classes);

    Mat dcls = Mat::Zero(cells, num_cls);
    Mat dbox = Mat::Zero(cells, 4);
    double ce = 0.0, weight_sum = 0.0, box_mse = 0.0;
    for (int i = 0; i < cells; ++i) {
        const bool positive = tgt.owner[i] >= 0;
        const double wgt = positive ? pos_weight : 1.0;
        const Vec probs = DetectorModel::softmax(cls_map.data.row(i).transpose());
        ce += -wgt * std::log(std::max(probs[tgt.cls[i]], 1e-300));
        weight_sum += wgt;
        dcls.row(i) = wgt * probs.transpose();
        dcls(i, tgt.cls[i]) -= wgt;
        if (positive) {
            const Eigen::RowVector4d diff = box_map.data.row(i) - tgt.box[i];
            box_mse += diff.squaredNorm();
            dbox.row(i) = 2.0 * diff;
        }
    }
    ce /= weight_sum;
    const double box_denom = std::max(1, 4 * tgt.num_positive);
    box_mse /= box_denom;
    const double loss = ce + box_weight * box_mse;

    if (grads) {
        dcls /= weight_sum;
        dbox *= box_weight / box_denom;
        // layer order: c1..c5, u3, u4, u5, head_cls, head_box
        auto& g = *grads;
        FeatureMap dp3 = model.head_cls.backward(p3, cls_map, dcls, g.dW[8], g.db[8]);
        const FeatureMap dp3_box = model.head_box.backward(p3, box_map, dbox, g.dW[9], g.db[9]);
        dp3.data += dp3_box.data;
        const FeatureMap da3 =
            model.backbone.u3.backward(trace.a3, p3, dp3.data, g.dW[5], g.db[5]);
        const FeatureMap da2 =
            model.backbone.c3.backward(trace.a2, trace.a3, da3.data, g.dW[2], g.db[2]);
        const FeatureMap da1 =
            model.backbone.c2.backward(trace.a1, trace.a2, da2.data, g.dW[1], g.db[1]);
        model.backbone.c1.backward(trace.x0, trace.a1, da1.data, g.dW[0], g.db[0]);
    }
    return loss;
}

// Plain SGD over shuffled minibatches. The detector is trained once and then
// frozen; relation-head training never touches these weights.
inline TrainLog train_detector(DetectorModel& model, const std::vector<ImageRecord>& records,
                               int epochs, double lr, int batch_size = 8,
                               std::uint64_t shuffle_seed = 11) {
    if (records.empty()) throw DataError("train_detector: empty dataset");
    Rng rng(shuffle_seed);
    TrainLog log;
    auto layers = model.conv_layers();

    std::vector<std::size_t> order(records.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < epochs; ++epoch) {
        // Fisher-Yates with the deterministic Rng
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng.uniform_int(0, static_cast<int>(i) - 1)]);

        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += batch_size) {
            const std::size_t end = std::min(order.size(), start + batch_size);
            DetectorGrads grads = DetectorGrads::zeros_like(model);
            for (std::size_t i = start; i < end; ++i)
                epoch_loss += detector_loss(model, records[order[i]], &grads);
            const double scale = lr / static_cast<double>(end - start);
            for (std::size_t l = 0; l < layers.size(); ++l) {
                auto* conv = const_cast<Conv3x3*>(layers[l].second);
                conv->W -= scale * grads.dW[l];
                conv->b -= scale * grads.db[l];
            }
        }
        log.epoch_losses.push_back(epoch_loss / records.size());
    }
    model.trained = true;
    return log;
}

}  // namespace sgg::det
