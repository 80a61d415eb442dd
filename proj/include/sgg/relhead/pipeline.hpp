#pragma once

#include <chrono>

#include "sgg/detector/detector.hpp"
#include "sgg/relhead/relhead.hpp"
#include "sgg/selection/selection.hpp"

namespace sgg::rel {

struct PipelineConfig {
    det::DetectorMode mode = det::DetectorMode::kPerfect;
    double nms_iou = 0.5;
};

struct StageTimes {
    double detector_ms = 0.0;
    double pooling_ms = 0.0;
    double relhead_ms = 0.0;
    double ranking_ms = 0.0;
    double total_ms = 0.0;
};

struct ForwardResult {
    SceneGraph graph;
    StageTimes times;
    std::size_t pairs_processed = 0;
};

// End-to-end decoupled two-stage flow:
//   detect -> nms -> topk(k_budget) -> roi_align -> encode -> pairs -> score -> rank.
// The graph carries the full post-NMS detection set untouched (freeze
// invariant); the budget only limits which proposals enter the relation
// stage.
class Pipeline {
public:
    Pipeline(const det::DetectorModel& detector, const RelHead& head, PipelineConfig cfg = {})
        : detector_(&detector), head_(&head), cfg_(cfg) {}

    ForwardResult run(const ImageRecord& rec, int k_budget) const {
        using clock = std::chrono::steady_clock;
        auto ms_since = [](clock::time_point t0) {
            return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
        };
        ForwardResult out;
        const auto t_start = clock::now();

        // Stage 1: frozen detector (+ NMS, already applied inside, idempotent
        // here) and budget selection.
        auto t0 = clock::now();
        auto [dets, pyramid] = detector_->detect_boxes(rec, cfg_.mode);
        dets = det::nms(dets, cfg_.nms_iou, true);
        const auto proposals = sel::topk_proposals(dets, k_budget);
        out.times.detector_ms = ms_since(t0);

        // Stage 1.5: 3-scale ROI align for surviving proposals only.
        t0 = clock::now();
        const int n = static_cast<int>(proposals.size());
        PairBatch batch;
        batch.node_inputs.resize(n, head_->cfg.d_vis + head_->cfg.d_txt);
        for (int i = 0; i < n; ++i) {
            const Vec visual = pooled_feature(pyramid, proposals[i].box, detector_->projector,
                                              detector_->cfg.canonical_box);
            batch.node_inputs.row(i) =
                head_->node_input(visual, proposals[i].class_id).transpose();
        }
        batch.pairs = sel::enumerate_pairs(n);
        const int m = batch.num_pairs();
        batch.spatial.resize(m, head_->cfg.spatial_dim());
        for (int i = 0; i < m; ++i)
            batch.spatial.row(i) =
                encode_spatial_ext(proposals[batch.pairs[i].first].box,
                                   proposals[batch.pairs[i].second].box, rec.width, rec.height,
                                   head_->cfg.extended_spatial)
                    .transpose();
        if (head_->cfg.flags.use_union) {
            batch.union_vis.resize(m, head_->cfg.d_vis);
            for (int i = 0; i < m; ++i) {
                const BoundingBox& a = proposals[batch.pairs[i].first].box;
                const BoundingBox& b = proposals[batch.pairs[i].second].box;
                const BoundingBox u{std::min(a.x1, b.x1), std::min(a.y1, b.y1),
                                    std::max(a.x2, b.x2), std::max(a.y2, b.y2)};
                batch.union_vis.row(i) = pooled_feature(pyramid, u, detector_->projector,
                                                        detector_->cfg.canonical_box)
                                             .transpose();
            }
        }
        out.times.pooling_ms = ms_since(t0);

        // Stage 2: efficient prototype relation head.
        t0 = clock::now();
        Mat probs(0, head_->cfg.num_predicates);
        if (m > 0) probs = predicate_probs(*head_, batch);
        out.times.relhead_ms = ms_since(t0);

        // Final ranking by theta_rel.
        t0 = clock::now();
        out.graph.image_id = rec.image_id;
        out.graph.detections = std::move(dets);
        out.graph.relations =
            score_relations(proposals, batch.pairs, probs, head_->cfg.graph_constraint);
        out.times.ranking_ms = ms_since(t0);

        out.pairs_processed = static_cast<std::size_t>(m);
        out.times.total_ms = ms_since(t_start);
        return out;
    }

    SceneGraph forward(const ImageRecord& rec, int k_budget) const {
        return run(rec, k_budget).graph;
    }

    const det::DetectorModel& detector() const { return *detector_; }
    const RelHead& head() const { return *head_; }
    const PipelineConfig& config() const { return cfg_; }

private:
    const det::DetectorModel* detector_;
    const RelHead* head_;
    PipelineConfig cfg_;
};

}  // namespace sgg::rel
