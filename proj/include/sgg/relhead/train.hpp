#pragma once

#include <numeric>
#include <vector>

#include "sgg/detector/detector.hpp"
#include "sgg/relhead/relhead.hpp"
#include "sgg/selection/selection.hpp"

namespace sgg::rel {

// Frozen stage-1 results for one image: proposals capped at the training
// budget theta, with pooled visual features (and pair union features when the
// U channel is on). Computing these once per image keeps epochs detector-free.
struct CachedImage {
    std::vector<Detection> proposals;
    Mat visual;     // n x d_vis
    Mat union_vis;  // n*(n-1) x d_vis, pair-major, only when requested
};

inline CachedImage cache_image(const det::DetectorModel& detector, det::DetectorMode mode,
                               const ImageRecord& rec, int theta, bool with_union) {
    CachedImage c;
    auto [dets, pyr] = detector.detect_boxes(rec, mode);
    c.proposals = sel::topk_proposals(dets, theta);
    const int n = static_cast<int>(c.proposals.size());
    c.visual.resize(n, detector.cfg.d_vis);
    for (int i = 0; i < n; ++i)
        c.visual.row(i) =
            pooled_feature(pyr, c.proposals[i].box, detector.projector, detector.cfg.canonical_box)
                .transpose();
    if (with_union) {
        const auto pairs = sel::enumerate_pairs(n);
        c.union_vis.resize(static_cast<Eigen::Index>(pairs.size()), detector.cfg.d_vis);
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            const BoundingBox& a = c.proposals[pairs[p].first].box;
            const BoundingBox& b = c.proposals[pairs[p].second].box;
            const BoundingBox u{std::min(a.x1, b.x1), std::min(a.y1, b.y1),
                                std::max(a.x2, b.x2), std::max(a.y2, b.y2)};
            c.union_vis.row(static_cast<Eigen::Index>(p)) =
                pooled_feature(pyr, u, detector.projector, detector.cfg.canonical_box).transpose();
        }
    }
    return c;
}

inline std::vector<CachedImage> precompute_cache(const det::DetectorModel& detector,
                                                 det::DetectorMode mode,
                                                 const std::vector<ImageRecord>& records,
                                                 int theta, bool with_union) {
    std::vector<CachedImage> cache;
    cache.reserve(records.size());
    for (const auto& rec : records) cache.push_back(cache_image(detector, mode, rec, theta, with_union));
    return cache;
}

// Assembles the training batch for one image: all enumerated pairs labelled
// against ground truth, background pairs subsampled at bg_ratio : 1.
// Returns a batch with no pairs when the image yields none.
inline PairBatch build_training_batch(const RelHead& head, const CachedImage& cache,
                                      const ImageRecord& rec, Rng& rng) {
    const auto& cfg = head.cfg;
    const int n = static_cast<int>(cache.proposals.size());
    PairBatch batch;
    batch.node_inputs.resize(n, cfg.d_vis + cfg.d_txt);
    for (int i = 0; i < n; ++i)
        batch.node_inputs.row(i) =
            head.node_input(cache.visual.row(i).transpose(), cache.proposals[i].class_id)
                .transpose();

    const auto all_pairs = sel::enumerate_pairs(n);
    auto raw_labels = pair_labels(cache.proposals, all_pairs, rec, cfg.match_iou);

    std::vector<std::size_t> fg, bg;
    for (std::size_t i = 0; i < all_pairs.size(); ++i)
        (raw_labels[i] >= 0 ? fg : bg).push_back(i);

    // bg_ratio : 1 background subsample; with no foreground matches the loss
    // runs over background pairs alone.
    std::size_t bg_keep = fg.empty()
                              ? bg.size()
                              : std::min(bg.size(), static_cast<std::size_t>(cfg.bg_ratio * fg.size()));
    for (std::size_t i = bg.size(); i > 1; --i)
        std::swap(bg[i - 1], bg[rng.uniform_int(0, static_cast<int>(i) - 1)]);
    bg.resize(bg_keep);

    std::vector<std::size_t> sel_idx = fg;
    sel_idx.insert(sel_idx.end(), bg.begin(), bg.end());
    std::sort(sel_idx.begin(), sel_idx.end());

    batch.spatial.resize(static_cast<Eigen::Index>(sel_idx.size()), cfg.spatial_dim());
    if (cfg.flags.use_union)
        batch.union_vis.resize(static_cast<Eigen::Index>(sel_idx.size()), cfg.d_vis);
    for (std::size_t row = 0; row < sel_idx.size(); ++row) {
        const std::size_t i = sel_idx[row];
        batch.pairs.push_back(all_pairs[i]);
        batch.labels.push_back(raw_labels[i] >= 0 ? raw_labels[i] : cfg.num_predicates);
        const auto& [si, oi] = all_pairs[i];
        batch.spatial.row(static_cast<Eigen::Index>(row)) =
            encode_spatial_ext(cache.proposals[si].box, cache.proposals[oi].box, rec.width,
                               rec.height, cfg.extended_spatial)
                .transpose();
        if (cfg.flags.use_union)
            batch.union_vis.row(static_cast<Eigen::Index>(row)) =
                cache.union_vis.row(static_cast<Eigen::Index>(i));
    }
    return batch;
}

// Row index of ordered pair (s, o) in enumerate_pairs(n) order.
inline std::size_t pair_index(int n, int s, int o) {
    return static_cast<std::size_t>(s) * (n - 1) + (o < s ? o : o - 1);
}

// Budget-sweep forward against cached stage-1 results: the first
// min(k_budget, n) cached proposals (already score-ordered) enter the
// relation stage. Used by the DCS grid so the frozen detector runs once.
inline SceneGraph cached_forward(const RelHead& head, const CachedImage& cache,
                                 const ImageRecord& rec, int k_budget) {
    const int n_all = static_cast<int>(cache.proposals.size());
    const int n = std::min(k_budget, n_all);
    SceneGraph graph;
    graph.image_id = rec.image_id;
    graph.detections = cache.proposals;

    std::vector<Detection> proposals(cache.proposals.begin(), cache.proposals.begin() + n);
    PairBatch batch;
    batch.node_inputs.resize(n, head.cfg.d_vis + head.cfg.d_txt);
    for (int i = 0; i < n; ++i)
        batch.node_inputs.row(i) =
            head.node_input(cache.visual.row(i).transpose(), proposals[i].class_id).transpose();
    batch.pairs = sel::enumerate_pairs(n);
    const int m = batch.num_pairs();
    batch.spatial.resize(m, head.cfg.spatial_dim());
    for (int i = 0; i < m; ++i)
        batch.spatial.row(i) =
            encode_spatial_ext(proposals[batch.pairs[i].first].box,
                               proposals[batch.pairs[i].second].box, rec.width, rec.height,
                               head.cfg.extended_spatial)
                .transpose();
    if (head.cfg.flags.use_union) {
        if (cache.union_vis.rows() == 0)
            throw DataError("cached_forward: union features not cached");
        batch.union_vis.resize(m, head.cfg.d_vis);
        for (int i = 0; i < m; ++i)
            batch.union_vis.row(i) = cache.union_vis.row(static_cast<Eigen::Index>(
                pair_index(n_all, batch.pairs[i].first, batch.pairs[i].second)));
    }
    if (m > 0) {
        const Mat probs = predicate_probs(head, batch);
        graph.relations = score_relations(proposals, batch.pairs, probs, head.cfg.graph_constraint);
    }
    return graph;
}

struct RelTrainLog {
    std::vector<double> epoch_losses;
};

inline void sgd_step(RelHead& head, const RelGrads& g, double scale) {
    head.node_enc.W -= scale * g.d_node_W;
    head.node_enc.b -= scale * g.d_node_b;
    if (!head.cfg.legacy_fusion) {
        head.fuse.W -= scale * g.d_fuse_W;
        head.fuse.b -= scale * g.d_fuse_b;
    }
    head.edge.W -= scale * g.d_edge_W;
    head.edge.b -= scale * g.d_edge_b;
    head.prototypes -= scale * g.d_proto;
    head.proto_bias -= scale * g.d_proto_bias;
}

// SGD over image minibatches against cached frozen-detector outputs. Only the
// relation loss is optimized; detector weights are not visible from here, so
// the freeze invariant holds by construction.
inline RelTrainLog train_relhead(RelHead& head, const std::vector<ImageRecord>& records,
                                 const std::vector<CachedImage>& cache, int epochs, double lr,
                                 int batch_images = 8, std::uint64_t seed = 13) {
    if (records.size() != cache.size())
        throw DataError("train_relhead: cache not aligned with records");
    Rng rng(seed);
    RelTrainLog log;
    std::vector<std::size_t> order(records.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng.uniform_int(0, static_cast<int>(i) - 1)]);

        double epoch_loss = 0.0;
        std::size_t counted = 0;
        for (std::size_t start = 0; start < order.size(); start += batch_images) {
            const std::size_t end = std::min(order.size(), start + batch_images);
            RelGrads grads = RelGrads::zeros_like(head);
            int used = 0;
            for (std::size_t i = start; i < end; ++i) {
                PairBatch batch = build_training_batch(head, cache[order[i]], records[order[i]], rng);
                if (batch.num_pairs() == 0) continue;  // no pairs at all: skip image
                epoch_loss += relation_loss(head, batch, &grads);
                ++used;
                ++counted;
            }
            if (used > 0) sgd_step(head, grads, lr / used);
        }
        log.epoch_losses.push_back(counted ? epoch_loss / counted : 0.0);
    }
    return log;
}

}  // namespace sgg::rel
