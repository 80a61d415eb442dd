#pragma once

#include <string>
#include <vector>

#include "sgg/core/errors.hpp"
#include "sgg/core/rng.hpp"
#include "sgg/core/types.hpp"
#include "sgg/detector/backbone.hpp"
#include "sgg/detector/checkpoint.hpp"
#include "sgg/detector/nms.hpp"
#include "sgg/detector/roi_align.hpp"

namespace sgg::det {

enum class DetectorMode { kPerfect, kNoisy, kLearned };

inline DetectorMode detector_mode_from_string(const std::string& s) {
    if (s == "perfect") return DetectorMode::kPerfect;
    if (s == "noisy") return DetectorMode::kNoisy;
    if (s == "learned") return DetectorMode::kLearned;
    throw ConfigError("unknown detector mode: " + s);
}

struct DetectorConfig {
    int num_classes = 12;
    int pyramid_channels = 64;
    std::array<int, 5> stem_channels = {8, 12, 16, 24, 32};
    int d_vis = 256;
    int pool_size = 7;
    double canonical_box = 56.0;  // scale-assignment constant, config knob
    double nms_iou = 0.5;
    double score_thresh = 0.3;
    int max_detections = 300;
    std::uint64_t init_seed = 1;
    // noisy-mode knobs
    double noise_sigma_px = 2.0;
    double noise_beta_a = 8.0;
    double noise_beta_b = 2.0;
    std::uint64_t noise_seed = 7;
};

// Stage-1 output. Detections are final: downstream stages must never alter
// box, class_id or score.
struct DetectorOutput {
    std::vector<Detection> detections;
    FeaturePyramid pyramid;
    std::vector<Vec> pooled;  // aligned 1:1 with detections
};

// Frozen detector with three modes: perfect (ground truth), noisy (jittered
// ground truth) and learned (tiny trainable per-cell head on P3).
struct DetectorModel {
    DetectorConfig cfg;
    Backbone backbone;
    RoiProjector projector;
    Conv3x3 head_cls;  // P3 -> num_classes + 1 (background last)
    Conv3x3 head_box;  // P3 -> 4 offsets (dx, dy, log w, log h) in stride units
    bool trained = false;

    static DetectorModel init(const DetectorConfig& cfg) {
        Rng rng(cfg.init_seed);
        DetectorModel m;
        m.cfg = cfg;
        m.backbone = Backbone::init(3, cfg.stem_channels, cfg.pyramid_channels, rng);
        m.projector = RoiProjector::init(cfg.pyramid_channels, cfg.pool_size, cfg.d_vis, rng);
        m.head_cls = Conv3x3::init(cfg.pyramid_channels, cfg.num_classes + 1, 1, false, rng);
        m.head_box = Conv3x3::init(cfg.pyramid_channels, 4, 1, false, rng);
        return m;
    }

    FeaturePyramid extract_pyramid(const Image& img) const { return backbone.forward(img); }

    std::vector<Detection> decode_learned(const FeaturePyramid& pyr, int img_w, int img_h) const {
        const FeatureMap cls = head_cls.forward(pyr.p3);
        const FeatureMap box = head_box.forward(pyr.p3);
        const int stride = FeaturePyramid::stride_of(3);
        std::vector<Detection> dets;
        for (int y = 0; y < cls.h; ++y) {
            for (int x = 0; x < cls.w; ++x) {
                const Eigen::RowVectorXd logits = cls.data.row(y * cls.w + x);
                const Vec probs = softmax(logits.transpose());
                int best = 0;
                for (int c = 1; c < cfg.num_classes; ++c)
                    if (probs[c] > probs[best]) best = c;
                const double score = probs[best];
                if (score < cfg.score_thresh) continue;

                const Eigen::RowVectorXd t = box.data.row(y * box.w + x);
                const double cx = ((x + 0.5) + t[0]) * stride;
                const double cy = ((y + 0.5) + t[1]) * stride;
                const double bw = std::exp(std::clamp(t[2], -4.0, 4.0)) * stride;
                const double bh = std::exp(std::clamp(t[3], -4.0, 4.0)) * stride;
                BoundingBox b{cx - 0.5 * bw, cy - 0.5 * bh, cx + 0.5 * bw, cy + 0.5 * bh};
                b.x1 = std::clamp(b.x1, 0.0, static_cast<double>(img_w));
                b.y1 = std::clamp(b.y1, 0.0, static_cast<double>(img_h));
                b.x2 = std::clamp(b.x2, 0.0, static_cast<double>(img_w));
                b.y2 = std::clamp(b.y2, 0.0, static_cast<double>(img_h));
                if (!(b.width() >= 1.0) || !(b.height() >= 1.0) || !std::isfinite(score))
                    continue;
                dets.push_back({b, best, score});
            }
        }
        dets = nms(dets, cfg.nms_iou, true);
        if (static_cast<int>(dets.size()) > cfg.max_detections) dets.resize(cfg.max_detections);
        return dets;
    }

    // Boxes + pyramid without per-detection pooling; the pipeline pools only
    // the proposals that survive the budget.
    std::pair<std::vector<Detection>, FeaturePyramid> detect_boxes(const ImageRecord& rec,
                                                                   DetectorMode mode) const {
        if (rec.image.empty())
            throw DataError("detect: record '" + rec.image_id + "' has no image payload");
        FeaturePyramid pyr = extract_pyramid(rec.image);

        std::vector<Detection> dets;
        switch (mode) {
            case DetectorMode::kPerfect: {
                for (std::size_t i = 0; i < rec.gt_boxes.size(); ++i)
                    dets.push_back({rec.gt_boxes[i], rec.gt_classes[i], 1.0});
                break;
            }
            case DetectorMode::kNoisy: {
                if (cfg.noise_sigma_px == 0.0) {  // degenerate noise: identical to perfect
                    for (std::size_t i = 0; i < rec.gt_boxes.size(); ++i)
                        dets.push_back({rec.gt_boxes[i], rec.gt_classes[i], 1.0});
                    break;
                }
                Rng noise(cfg.noise_seed ^ fnv1a64(rec.image_id));
                for (std::size_t i = 0; i < rec.gt_boxes.size(); ++i) {
                    BoundingBox b = rec.gt_boxes[i];
                    b.x1 = std::clamp(b.x1 + noise.normal(0, cfg.noise_sigma_px), 0.0, double(rec.width) - 1.0);
                    b.y1 = std::clamp(b.y1 + noise.normal(0, cfg.noise_sigma_px), 0.0, double(rec.height) - 1.0);
                    b.x2 = std::clamp(b.x2 + noise.normal(0, cfg.noise_sigma_px), b.x1 + 1.0, double(rec.width));
                    b.y2 = std::clamp(b.y2 + noise.normal(0, cfg.noise_sigma_px), b.y1 + 1.0, double(rec.height));
                    const double score = noise.beta(cfg.noise_beta_a, cfg.noise_beta_b);
                    dets.push_back({b, rec.gt_classes[i], score});
                }
                break;
            }
            case DetectorMode::kLearned: {
                if (!trained)
                    throw NotTrainedError("learned detector has no trained weights; run train-detector first");
                dets = decode_learned(pyr, rec.width, rec.height);
                break;
            }
        }
        dets = nms(dets, cfg.nms_iou, true);
        return {std::move(dets), std::move(pyr)};
    }

    std::vector<Vec> pool_all(const FeaturePyramid& pyr, const std::vector<Detection>& dets) const {
        std::vector<Vec> pooled;
        pooled.reserve(dets.size());
        for (const auto& d : dets) pooled.push_back(pooled_feature(pyr, d.box, projector, cfg.canonical_box));
        return pooled;
    }

    DetectorOutput detect(const ImageRecord& rec, DetectorMode mode) const {
        auto [dets, pyr] = detect_boxes(rec, mode);
        DetectorOutput out;
        out.pooled = pool_all(pyr, dets);
        out.detections = std::move(dets);
        out.pyramid = std::move(pyr);
        return out;
    }

    static Vec softmax(const Vec& logits) {
        const Vec shifted = logits.array() - logits.maxCoeff();
        const Vec e = shifted.array().exp();
        return e / e.sum();
    }

    // --- serialization -----------------------------------------------------

    std::vector<std::pair<std::string, const Conv3x3*>> conv_layers() const {
        return {{"backbone.c1", &backbone.c1}, {"backbone.c2", &backbone.c2},
                {"backbone.c3", &backbone.c3}, {"backbone.c4", &backbone.c4},
                {"backbone.c5", &backbone.c5}, {"backbone.u3", &backbone.u3},
                {"backbone.u4", &backbone.u4}, {"backbone.u5", &backbone.u5},
                {"head.cls", &head_cls},       {"head.box", &head_box}};
    }

    Checkpoint to_checkpoint() const {
        Checkpoint ckpt;
        ckpt.kind = "detector";
        ckpt.meta = {{"num_classes", cfg.num_classes},
                     {"pyramid_channels", cfg.pyramid_channels},
                     {"stem_channels", cfg.stem_channels},
                     {"d_vis", cfg.d_vis},
                     {"pool_size", cfg.pool_size},
                     {"canonical_box", cfg.canonical_box},
                     {"trained", trained}};
        for (const auto& [name, conv] : conv_layers()) {
            ckpt.tensors.push_back(TensorEntry::from_matrix(name + ".W", conv->W));
            ckpt.tensors.push_back(TensorEntry::from_vector(name + ".b", conv->b));
        }
        ckpt.tensors.push_back(TensorEntry::from_matrix("projector.W", projector.W));
        ckpt.tensors.push_back(TensorEntry::from_vector("projector.b", projector.b));
        return ckpt;
    }

    static DetectorModel from_checkpoint(const Checkpoint& ckpt, DetectorConfig cfg) {
        if (ckpt.kind != "detector") throw DataError("checkpoint kind is not 'detector'");
        cfg.num_classes = ckpt.meta.at("num_classes").get<int>();
        cfg.pyramid_channels = ckpt.meta.at("pyramid_channels").get<int>();
        cfg.stem_channels = ckpt.meta.at("stem_channels").get<std::array<int, 5>>();
        cfg.d_vis = ckpt.meta.at("d_vis").get<int>();
        cfg.pool_size = ckpt.meta.at("pool_size").get<int>();
        cfg.canonical_box = ckpt.meta.at("canonical_box").get<double>();
        DetectorModel m = init(cfg);
        m.trained = ckpt.meta.value("trained", false);
        auto layers = m.conv_layers();
        for (const auto& [name, conv] : layers) {
            const_cast<Conv3x3*>(conv)->W = ckpt.tensor(name + ".W").to_matrix();
            const_cast<Conv3x3*>(conv)->b = ckpt.tensor(name + ".b").to_vector();
        }
        m.projector.W = ckpt.tensor("projector.W").to_matrix();
        m.projector.b = ckpt.tensor("projector.b").to_vector();
        return m;
    }
};

}  // namespace sgg::det
