#pragma once

#include "sgg/metrics/metrics.hpp"
#include "sgg/relhead/pipeline.hpp"

namespace sgg::metrics {

// Runs the full pipeline per image at the given proposal budget and
// aggregates every metric, including the freeze-invariant mAP cross-check
// (pipeline detections vs detector-only detections).
inline MetricReport evaluate_dataset(const rel::Pipeline& pipeline,
                                     const std::vector<ImageRecord>& records,
                                     const std::vector<int>& Ks, int k_budget, int num_classes,
                                     int num_predicates) {
    std::vector<SceneGraph> graphs;
    std::vector<std::vector<Detection>> detector_only;
    graphs.reserve(records.size());
    detector_only.reserve(records.size());
    for (const auto& rec : records) {
        graphs.push_back(pipeline.forward(rec, k_budget));
        auto [dets, pyr] = pipeline.detector().detect_boxes(rec, pipeline.config().mode);
        detector_only.push_back(std::move(dets));
    }
    MetricReport rep = evaluate_graphs(graphs, records, detector_only, Ks, num_classes, num_predicates);
    rep.k_budget = k_budget;
    rep.graph_constraint = pipeline.head().cfg.graph_constraint;
    return rep;
}

}  // namespace sgg::metrics
