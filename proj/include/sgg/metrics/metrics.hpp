#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <vector>

#include <nlohmann/json.hpp>

#include "sgg/core/errors.hpp"
#include "sgg/core/types.hpp"
#include "sgg/metrics/iou.hpp"

namespace sgg::metrics {

// Walks predictions in rank order up to K. A prediction matches a ground
// truth triplet iff the predicate and both endpoint classes agree and both
// boxes reach the IoU threshold; every GT triplet is matched at most once,
// greedily by prediction rank. Returns matched GT triplet indices.
inline std::vector<int> match_triplets(const std::vector<ScoredRelation>& ranked,
                                       const ImageRecord& gt, double iou_thresh, int K) {
    std::vector<bool> taken(gt.gt_relations.size(), false);
    std::vector<int> matched;
    const int limit = std::min<int>(K, static_cast<int>(ranked.size()));
    for (int r = 0; r < limit; ++r) {
        const ScoredRelation& pred = ranked[r];
        for (std::size_t g = 0; g < gt.gt_relations.size(); ++g) {
            if (taken[g]) continue;
            const RelationTriplet& t = gt.gt_relations[g];
            if (t.pred_id != pred.pred_id) continue;
            if (gt.gt_classes[t.subj_idx] != pred.subj.class_id) continue;
            if (gt.gt_classes[t.obj_idx] != pred.obj.class_id) continue;
            if (iou(pred.subj.box, gt.gt_boxes[t.subj_idx]) < iou_thresh) continue;
            if (iou(pred.obj.box, gt.gt_boxes[t.obj_idx]) < iou_thresh) continue;
            taken[g] = true;
            matched.push_back(static_cast<int>(g));
            break;
        }
    }
    return matched;
}

// R@K: mean over images of matched/|GT|; images without GT relations are
// skipped. Throws when every image is skipped (undefined recall).
inline double recall_at_k(const std::vector<SceneGraph>& graphs,
                          const std::vector<ImageRecord>& records, int K,
                          double iou_thresh = 0.5) {
    double sum = 0.0;
    int counted = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].gt_relations.empty()) continue;
        const auto matched = match_triplets(graphs[i].relations, records[i], iou_thresh, K);
        sum += static_cast<double>(matched.size()) / records[i].gt_relations.size();
        ++counted;
    }
    if (counted == 0) throw DataError("recall_at_k: no image has ground-truth relations");
    return sum / counted;
}

// mR@K: per-predicate recall tallied over the dataset, averaged over the
// predicate classes with at least one GT instance.
inline double mean_recall_at_k(const std::vector<SceneGraph>& graphs,
                               const std::vector<ImageRecord>& records, int K,
                               int num_predicates, double iou_thresh = 0.5) {
    std::vector<double> matched_per_pred(num_predicates, 0.0), total_per_pred(num_predicates, 0.0);
    for (std::size_t i = 0; i < records.size(); ++i) {
        for (const auto& t : records[i].gt_relations) total_per_pred[t.pred_id] += 1.0;
        const auto matched = match_triplets(graphs[i].relations, records[i], iou_thresh, K);
        for (const int g : matched)
            matched_per_pred[records[i].gt_relations[g].pred_id] += 1.0;
    }
    double sum = 0.0;
    int classes = 0;
    for (int p = 0; p < num_predicates; ++p) {
        if (total_per_pred[p] == 0.0) continue;
        sum += matched_per_pred[p] / total_per_pred[p];
        ++classes;
    }
    if (classes == 0) throw DataError("mean_recall_at_k: no ground-truth relations at all");
    return sum / classes;
}

// Per-predicate recall table (classes without GT get -1).
inline std::vector<double> per_predicate_recall(const std::vector<SceneGraph>& graphs,
                                                const std::vector<ImageRecord>& records, int K,
                                                int num_predicates, double iou_thresh = 0.5) {
    std::vector<double> matched(num_predicates, 0.0), total(num_predicates, 0.0);
    for (std::size_t i = 0; i < records.size(); ++i) {
        for (const auto& t : records[i].gt_relations) total[t.pred_id] += 1.0;
        for (const int g : match_triplets(graphs[i].relations, records[i], iou_thresh, K))
            matched[records[i].gt_relations[g].pred_id] += 1.0;
    }
    std::vector<double> out(num_predicates, -1.0);
    for (int p = 0; p < num_predicates; ++p)
        if (total[p] > 0.0) out[p] = matched[p] / total[p];
    return out;
}

// Harmonic mean of R@K and mR@K; defined as 0 when both are 0.
inline double f1_at_k(double recall, double mean_recall) {
    if (recall + mean_recall == 0.0) return 0.0;
    return 2.0 * recall * mean_recall / (recall + mean_recall);
}

// mAP@50 with dataset-wide per-class ranking, greedy TP assignment at
// IoU >= 0.5 (one detection per GT) and 101-point PR interpolation. Classes
// without GT instances are excluded from the mean.
inline double map50(const std::vector<std::vector<Detection>>& detections,
                    const std::vector<ImageRecord>& records, int num_classes,
                    double iou_thresh = 0.5) {
    double ap_sum = 0.0;
    int classes_counted = 0;
    for (int cls = 0; cls < num_classes; ++cls) {
        int num_gt = 0;
        for (const auto& rec : records)
            for (const int c : rec.gt_classes)
                if (c == cls) ++num_gt;
        if (num_gt == 0) continue;

        // (score, image, det index), ranked dataset-wide
        struct Entry {
            double score;
            std::size_t img;
            std::size_t det;
        };
        std::vector<Entry> entries;
        for (std::size_t i = 0; i < detections.size(); ++i)
            for (std::size_t d = 0; d < detections[i].size(); ++d)
                if (detections[i][d].class_id == cls) entries.push_back({detections[i][d].score, i, d});
        std::stable_sort(entries.begin(), entries.end(),
                         [](const Entry& a, const Entry& b) { return a.score > b.score; });

        std::vector<std::vector<bool>> gt_taken(records.size());
        for (std::size_t i = 0; i < records.size(); ++i)
            gt_taken[i].assign(records[i].gt_boxes.size(), false);

        std::vector<bool> is_tp(entries.size(), false);
        for (std::size_t e = 0; e < entries.size(); ++e) {
            const auto& rec = records[entries[e].img];
            const auto& box = detections[entries[e].img][entries[e].det].box;
            double best_iou = iou_thresh;
            int best_g = -1;
            for (std::size_t g = 0; g < rec.gt_boxes.size(); ++g) {
                if (rec.gt_classes[g] != cls || gt_taken[entries[e].img][g]) continue;
                const double v = iou(box, rec.gt_boxes[g]);
                if (v >= best_iou) {
                    best_iou = v;
                    best_g = static_cast<int>(g);
                }
            }
            if (best_g >= 0) {
                gt_taken[entries[e].img][best_g] = true;
                is_tp[e] = true;
            }
        }

        std::vector<double> precision(entries.size()), recall(entries.size());
        int tp = 0;
        for (std::size_t e = 0; e < entries.size(); ++e) {
            if (is_tp[e]) ++tp;
            precision[e] = static_cast<double>(tp) / (e + 1);
            recall[e] = static_cast<double>(tp) / num_gt;
        }

        double ap = 0.0;
        for (int r = 0; r <= 100; ++r) {
            const double rec_level = r / 100.0;
            double best = 0.0;
            for (std::size_t e = 0; e < entries.size(); ++e)
                if (recall[e] >= rec_level) best = std::max(best, precision[e]);
            ap += best / 101.0;
        }
        ap_sum += ap;
        ++classes_counted;
    }
    return classes_counted ? ap_sum / classes_counted : 0.0;
}

struct MetricReport {
    std::map<int, double> recall;       // K -> R@K
    std::map<int, double> mean_recall;  // K -> mR@K
    std::map<int, double> f1;           // K -> F1@K
    double f1_average = 0.0;
    double map50_pipeline = 0.0;
    double map50_detector_only = 0.0;
    bool freeze_invariant_holds = false;
    std::vector<double> per_predicate;  // recall@max(K) per predicate class
    int num_images = 0;
    int num_gt_triplets = 0;
    int k_budget = 0;
    bool graph_constraint = true;

    nlohmann::json to_json() const {
        auto kmap = [](const std::map<int, double>& m) {
            nlohmann::json j = nlohmann::json::object();
            for (const auto& [k, v] : m) j[std::to_string(k)] = v;
            return j;
        };
        return {{"format", "sgg-lab/1"},
                {"kind", "metric_report"},
                {"recall", kmap(recall)},
                {"mean_recall", kmap(mean_recall)},
                {"f1", kmap(f1)},
                {"f1_average", f1_average},
                {"map50", map50_pipeline},
                {"map50_detector_only", map50_detector_only},
                {"freeze_invariant_holds", freeze_invariant_holds},
                {"per_predicate_recall", per_predicate},
                {"num_images", num_images},
                {"num_gt_triplets", num_gt_triplets},
                {"k_budget", k_budget},
                {"graph_constraint", graph_constraint}};
    }
};

// Evaluates pre-computed scene graphs against records. `detector_only` holds
// the raw stage-1 detections for the freeze-invariant cross-check; pass the
// graphs' own detections when only relation metrics are wanted.
inline MetricReport evaluate_graphs(const std::vector<SceneGraph>& graphs,
                                    const std::vector<ImageRecord>& records,
                                    const std::vector<std::vector<Detection>>& detector_only,
                                    const std::vector<int>& Ks, int num_classes,
                                    int num_predicates) {
    if (graphs.size() != records.size())
        throw DataError("evaluate_graphs: graphs not aligned with records");
    MetricReport rep;
    rep.num_images = static_cast<int>(records.size());
    for (const auto& rec : records) rep.num_gt_triplets += static_cast<int>(rec.gt_relations.size());

    for (const int K : Ks) {
        rep.recall[K] = recall_at_k(graphs, records, K);
        rep.mean_recall[K] = mean_recall_at_k(graphs, records, K, num_predicates);
        rep.f1[K] = f1_at_k(rep.recall[K], rep.mean_recall[K]);
    }
    if (!Ks.empty()) {
        for (const auto& [k, v] : rep.f1) rep.f1_average += v;
        rep.f1_average /= static_cast<double>(rep.f1.size());
        rep.per_predicate = per_predicate_recall(graphs, records, *std::max_element(Ks.begin(), Ks.end()),
                                                 num_predicates);
    }

    std::vector<std::vector<Detection>> pipeline_dets;
    pipeline_dets.reserve(graphs.size());
    for (const auto& g : graphs) pipeline_dets.push_back(g.detections);
    rep.map50_pipeline = map50(pipeline_dets, records, num_classes);
    rep.map50_detector_only = map50(detector_only, records, num_classes);
    rep.freeze_invariant_holds = [&] {
        for (std::size_t i = 0; i < graphs.size(); ++i)
            if (graphs[i].detections != detector_only[i]) return false;
        return rep.map50_pipeline == rep.map50_detector_only;
    }();
    return rep;
}

}  // namespace sgg::metrics
