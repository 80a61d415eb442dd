#pragma once

#include <unordered_map>
#include <vector>

#include "sgg/core/errors.hpp"
#include "sgg/core/linalg.hpp"
#include "sgg/core/rng.hpp"
#include "sgg/core/types.hpp"
#include "sgg/detector/checkpoint.hpp"
#include "sgg/metrics/iou.hpp"
#include "sgg/relhead/embeddings.hpp"

namespace sgg::rel {

// Feature-source switches (Table-style T/V/S/U grid). At least one of the
// node channels (text/visual) must stay on.
struct AblationFlags {
    bool use_text = true;
    bool use_visual = true;
    bool use_spatial = true;
    bool use_union = false;

    void validate() const {
        if (!use_text && !use_visual)
            throw ConfigError("ablation: at least one of text/visual must be enabled");
    }
};

struct RelHeadConfig {
    int num_predicates = 6;
    int d_vis = 256;
    int d_txt = 64;
    int d_node = 256;
    int d_edge = 512;
    // Extension knob for the spatial encoding: adds hinge-of-containment-
    // margin and axis-dominance channels (12 -> 18) so containment-style
    // predicates become linearly scorable.
    bool extended_spatial = false;
    bool legacy_fusion = false;  // ReLU(s+o) - (s-o)^2 instead of the linear layer
    AblationFlags flags;
    bool graph_constraint = true;
    double match_iou = 0.5;
    double bg_ratio = 3.0;
    std::uint64_t init_seed = 2;

    int spatial_dim() const { return extended_spatial ? 18 : 12; }
    int pair_dim() const { return legacy_fusion ? d_node : d_edge; }
    int edge_input_dim() const {
        return pair_dim() + spatial_dim() + (flags.use_union ? d_vis : 0);
    }
};

// Explicit pair geometry: subject box normalized (4), object box normalized
// (4), center offset (object - subject) normalized (2), log area ratio
// log(area_s / area_o) (1), pair IoU (1).
inline Vec encode_spatial(const BoundingBox& subj, const BoundingBox& obj, double img_w,
                          double img_h) {
    Vec v(12);
    v << subj.x1 / img_w, subj.y1 / img_h, subj.x2 / img_w, subj.y2 / img_h,
        obj.x1 / img_w, obj.y1 / img_h, obj.x2 / img_w, obj.y2 / img_h,
        (obj.center_x() - subj.center_x()) / img_w, (obj.center_y() - subj.center_y()) / img_h,
        std::log(subj.area() / obj.area()), iou(subj, obj);
    return v;
}

// Extension channels (6): containment indicators for both directions, signed
// containment depth (min margin, saturated at 16 px), an amplified margin
// around the overlap IoU threshold, and the dominant-axis signal. These put
// every geometric decision boundary at O(1) feature scale.
inline Vec encode_spatial_ext(const BoundingBox& subj, const BoundingBox& obj, double img_w,
                              double img_h, bool extended) {
    const Vec base = encode_spatial(subj, obj, img_w, img_h);
    if (!extended) return base;
    auto min_margin = [](const BoundingBox& a, const BoundingBox& b) {
        return std::min(std::min(a.x1 - b.x1, a.y1 - b.y1),
                        std::min(b.x2 - a.x2, b.y2 - a.y2));
    };
    const double m_fwd = min_margin(subj, obj);
    const double m_rev = min_margin(obj, subj);
    Vec v(18);
    v << base,
        m_fwd >= 0.0 ? 1.0 : 0.0,                 // subj contained in obj
        m_rev >= 0.0 ? 1.0 : 0.0,                 // obj contained in subj
        std::clamp(m_fwd / 16.0, -1.0, 1.0),      // containment depth, signed
        std::clamp(m_rev / 16.0, -1.0, 1.0),
        std::clamp((base[11] - 0.05) * 10.0, -1.0, 1.0),  // IoU-threshold margin
        std::abs(obj.center_x() - subj.center_x()) / img_w -
            std::abs(obj.center_y() - subj.center_y()) / img_h;
    return v;
}

// theta_rel = theta_subj * theta_pred * theta_obj, evaluated left to right so
// the invariant can be re-checked bit-exactly.
inline double relation_score(double subj_score, double theta_pred, double obj_score) {
    return subj_score * theta_pred * obj_score;
}

struct Linear {
    Mat W;
    Vec b;

    static Linear init(int in_dim, int out_dim, Rng& rng) {
        Linear l;
        l.W = random_init(out_dim, in_dim, in_dim, rng);
        l.b = Vec::Zero(out_dim);
        return l;
    }

    Vec forward(const Vec& x) const { return W * x + b; }
    // Row-batched forward: X is (batch x in_dim).
    Mat forward_rows(const Mat& X) const {
        Mat y = X * W.transpose();
        y.rowwise() += b.transpose();
        return y;
    }

    std::size_t param_count() const { return static_cast<std::size_t>(W.size() + b.size()); }
};

// Efficient prototype-learning relation head: node encoding from visual and
// text channels, a single linear pair fusion (no gate), spatial features fed
// directly to the edge projection, and predicate scoring as a dot product
// against learned per-predicate prototype vectors. Training adds one extra
// background prototype row used only by the loss; inference scores the real
// predicates.
struct RelHead {
    RelHeadConfig cfg;
    EmbeddingTable embeddings;  // frozen
    Linear node_enc;            // (d_vis + d_txt) -> d_node
    Linear fuse;                // (2 d_node) -> d_edge (unused in legacy mode)
    Linear edge;                // edge_input_dim -> d_edge
    Mat prototypes;             // (P+1) x d_edge, background last
    Vec proto_bias;             // P+1

    static RelHead init(const RelHeadConfig& cfg, const std::vector<std::string>& class_names) {
        cfg.flags.validate();
        RelHead h;
        h.cfg = cfg;
        h.embeddings = EmbeddingTable::pseudo(class_names, cfg.d_txt);
        Rng rng(cfg.init_seed);
        h.node_enc = Linear::init(cfg.d_vis + cfg.d_txt, cfg.d_node, rng);
        h.fuse = Linear::init(2 * cfg.d_node, cfg.d_edge, rng);
        h.edge = Linear::init(cfg.edge_input_dim(), cfg.d_edge, rng);
        h.prototypes = random_init(cfg.num_predicates + 1, cfg.d_edge, cfg.d_edge, rng);
        h.proto_bias = Vec::Zero(cfg.num_predicates + 1);
        return h;
    }

    // Masked node input [visual | text]; disabled channels are zeroed.
    Vec node_input(const Vec& visual, int class_id) const {
        Vec x = Vec::Zero(cfg.d_vis + cfg.d_txt);
        if (cfg.flags.use_visual) x.head(cfg.d_vis) = visual;
        if (cfg.flags.use_text) x.tail(cfg.d_txt) = embeddings.embed(class_id).transpose();
        return x;
    }

    Vec encode_node(const Vec& visual, int class_id) const {
        return node_enc.forward(node_input(visual, class_id));
    }

    // Subject channel first, so fusion is order-sensitive in the default
    // (linear) mode. Legacy mode reproduces ReLU(s + o) - (s - o)^2.
    Vec fuse_pair(const Vec& s, const Vec& o) const {
        if (s.size() != o.size()) throw DataError("fuse_pair: node dimension mismatch");
        if (cfg.legacy_fusion) {
            const Vec sum = (s + o).cwiseMax(0.0);
            const Vec diff = s - o;
            return sum - diff.cwiseProduct(diff);
        }
        Vec x(2 * s.size());
        x << s, o;
        return fuse.forward(x);
    }

    Vec edge_input(const Vec& pair_rep, const Vec& spatial, const Vec* union_vis) const {
        Vec x = Vec::Zero(cfg.edge_input_dim());
        x.head(pair_rep.size()) = pair_rep;
        if (cfg.flags.use_spatial) x.segment(pair_rep.size(), cfg.spatial_dim()) = spatial;
        if (cfg.flags.use_union) {
            if (!union_vis) throw DataError("union features enabled but not provided");
            x.tail(cfg.d_vis) = *union_vis;
        }
        return x;
    }

    Vec predicate_logits(const Vec& edge_rep) const {
        return prototypes.topRows(cfg.num_predicates) * edge_rep +
               proto_bias.head(cfg.num_predicates);
    }

    static Vec softmax(const Vec& logits) {
        const Vec shifted = logits.array() - logits.maxCoeff();
        const Vec e = shifted.array().exp();
        return e / e.sum();
    }

    // theta_pred distribution over the predicate classes for one pair.
    Vec score_predicates(const Vec& pair_rep, const Vec& spatial,
                         const Vec* union_vis = nullptr) const {
        return softmax(predicate_logits(edge.forward(edge_input(pair_rep, spatial, union_vis))));
    }

    std::vector<std::pair<std::string, std::size_t>> param_layout() const {
        return {{"node_enc", node_enc.param_count()},
                {"fuse", cfg.legacy_fusion ? 0 : fuse.param_count()},
                {"edge", edge.param_count()},
                {"prototypes", static_cast<std::size_t>(prototypes.size())},
                {"proto_bias", static_cast<std::size_t>(proto_bias.size())}};
    }

    Checkpoint to_checkpoint() const {
        Checkpoint ckpt;
        ckpt.kind = "relhead";
        ckpt.meta = {{"num_predicates", cfg.num_predicates},
                     {"d_vis", cfg.d_vis},
                     {"d_txt", cfg.d_txt},
                     {"d_node", cfg.d_node},
                     {"d_edge", cfg.d_edge},
                     {"legacy_fusion", cfg.legacy_fusion},
                     {"extended_spatial", cfg.extended_spatial},
                     {"use_text", cfg.flags.use_text},
                     {"use_visual", cfg.flags.use_visual},
                     {"use_spatial", cfg.flags.use_spatial},
                     {"use_union", cfg.flags.use_union}};
        ckpt.tensors = {TensorEntry::from_matrix("node_enc.W", node_enc.W),
                        TensorEntry::from_vector("node_enc.b", node_enc.b),
                        TensorEntry::from_matrix("fuse.W", fuse.W),
                        TensorEntry::from_vector("fuse.b", fuse.b),
                        TensorEntry::from_matrix("edge.W", edge.W),
                        TensorEntry::from_vector("edge.b", edge.b),
                        TensorEntry::from_matrix("prototypes", prototypes),
                        TensorEntry::from_vector("proto_bias", proto_bias),
                        TensorEntry::from_matrix("embeddings", embeddings.vectors)};
        return ckpt;
    }

    static RelHead from_checkpoint(const Checkpoint& ckpt, RelHeadConfig cfg,
                                   const std::vector<std::string>& class_names) {
        if (ckpt.kind != "relhead") throw DataError("checkpoint kind is not 'relhead'");
        cfg.num_predicates = ckpt.meta.at("num_predicates").get<int>();
        cfg.d_vis = ckpt.meta.at("d_vis").get<int>();
        cfg.d_txt = ckpt.meta.at("d_txt").get<int>();
        cfg.d_node = ckpt.meta.at("d_node").get<int>();
        cfg.d_edge = ckpt.meta.at("d_edge").get<int>();
        cfg.legacy_fusion = ckpt.meta.at("legacy_fusion").get<bool>();
        cfg.extended_spatial = ckpt.meta.value("extended_spatial", false);
        cfg.flags.use_text = ckpt.meta.at("use_text").get<bool>();
        cfg.flags.use_visual = ckpt.meta.at("use_visual").get<bool>();
        cfg.flags.use_spatial = ckpt.meta.at("use_spatial").get<bool>();
        cfg.flags.use_union = ckpt.meta.at("use_union").get<bool>();
        RelHead h = init(cfg, class_names);
        h.node_enc.W = ckpt.tensor("node_enc.W").to_matrix();
        h.node_enc.b = ckpt.tensor("node_enc.b").to_vector();
        h.fuse.W = ckpt.tensor("fuse.W").to_matrix();
        h.fuse.b = ckpt.tensor("fuse.b").to_vector();
        h.edge.W = ckpt.tensor("edge.W").to_matrix();
        h.edge.b = ckpt.tensor("edge.b").to_vector();
        h.prototypes = ckpt.tensor("prototypes").to_matrix();
        h.proto_bias = ckpt.tensor("proto_bias").to_vector();
        h.embeddings.vectors = ckpt.tensor("embeddings").to_matrix();
        h.embeddings.dim = cfg.d_txt;
        return h;
    }
};

// One image worth of pair-classification work, batched as matrices.
struct PairBatch {
    Mat node_inputs;                        // n x (d_vis + d_txt), masks applied
    std::vector<std::pair<int, int>> pairs; // (subj, obj) proposal indices
    Mat spatial;                            // m x 12
    Mat union_vis;                          // m x d_vis when the U channel is on
    std::vector<int> labels;                // m; predicate id or P for background

    int num_pairs() const { return static_cast<int>(pairs.size()); }
};

// Batched forward producing per-pair logits over P+1 classes (background
// last). Intermediates are kept for the backward pass.
struct ForwardTrace {
    Mat nodes;     // n x d_node
    Mat fuse_in;   // m x 2 d_node (linear mode)
    Mat pair_rep;  // m x pair_dim
    Mat edge_in;   // m x edge_input_dim
    Mat edge_rep;  // m x d_edge
    Mat logits;    // m x (P+1)
};

inline ForwardTrace relhead_forward(const RelHead& h, const PairBatch& batch) {
    const auto& cfg = h.cfg;
    ForwardTrace t;
    t.nodes = h.node_enc.forward_rows(batch.node_inputs);

    const int m = batch.num_pairs();
    t.pair_rep.resize(m, cfg.pair_dim());
    if (cfg.legacy_fusion) {
        for (int i = 0; i < m; ++i) {
            const Vec s = t.nodes.row(batch.pairs[i].first).transpose();
            const Vec o = t.nodes.row(batch.pairs[i].second).transpose();
            t.pair_rep.row(i) = h.fuse_pair(s, o).transpose();
        }
    } else {
        t.fuse_in.resize(m, 2 * cfg.d_node);
        for (int i = 0; i < m; ++i) {
            t.fuse_in.block(i, 0, 1, cfg.d_node) = t.nodes.row(batch.pairs[i].first);
            t.fuse_in.block(i, cfg.d_node, 1, cfg.d_node) = t.nodes.row(batch.pairs[i].second);
        }
        t.pair_rep = h.fuse.forward_rows(t.fuse_in);
    }

    t.edge_in = Mat::Zero(m, cfg.edge_input_dim());
    t.edge_in.leftCols(cfg.pair_dim()) = t.pair_rep;
    if (cfg.flags.use_spatial)
        t.edge_in.middleCols(cfg.pair_dim(), cfg.spatial_dim()) = batch.spatial;
    if (cfg.flags.use_union) {
        if (batch.union_vis.rows() != m) throw DataError("union features enabled but not provided");
        t.edge_in.rightCols(cfg.d_vis) = batch.union_vis;
    }
    t.edge_rep = h.edge.forward_rows(t.edge_in);
    t.logits = t.edge_rep * h.prototypes.transpose();
    t.logits.rowwise() += h.proto_bias.transpose();
    return t;
}

// Per-pair theta_pred rows (softmax over the P real predicates).
inline Mat predicate_probs(const RelHead& h, const PairBatch& batch) {
    const ForwardTrace t = relhead_forward(h, batch);
    const int P = h.cfg.num_predicates;
    Mat probs(t.logits.rows(), P);
    for (Eigen::Index i = 0; i < t.logits.rows(); ++i)
        probs.row(i) = RelHead::softmax(t.logits.row(i).head(P).transpose()).transpose();
    return probs;
}

struct RelGrads {
    Mat d_node_W;
    Vec d_node_b;
    Mat d_fuse_W;
    Vec d_fuse_b;
    Mat d_edge_W;
    Vec d_edge_b;
    Mat d_proto;
    Vec d_proto_bias;

    static RelGrads zeros_like(const RelHead& h) {
        RelGrads g;
        g.d_node_W = Mat::Zero(h.node_enc.W.rows(), h.node_enc.W.cols());
        g.d_node_b = Vec::Zero(h.node_enc.b.size());
        g.d_fuse_W = Mat::Zero(h.fuse.W.rows(), h.fuse.W.cols());
        g.d_fuse_b = Vec::Zero(h.fuse.b.size());
        g.d_edge_W = Mat::Zero(h.edge.W.rows(), h.edge.W.cols());
        g.d_edge_b = Vec::Zero(h.edge.b.size());
        g.d_proto = Mat::Zero(h.prototypes.rows(), h.prototypes.cols());
        g.d_proto_bias = Vec::Zero(h.proto_bias.size());
        return g;
    }
};

// Mean cross-entropy over predicate classes plus the background class.
// L_total carries no object-classification term: the detector is frozen and
// its classes pass through untouched.
inline double relation_loss(const RelHead& h, const PairBatch& batch, RelGrads* grads = nullptr) {
    const int m = batch.num_pairs();
    if (m == 0 || batch.labels.empty()) throw DataError("relation_loss: empty batch");
    const ForwardTrace t = relhead_forward(h, batch);
    const int num_cls = h.cfg.num_predicates + 1;

    double loss = 0.0;
    Mat dlogits = Mat::Zero(m, num_cls);
    for (int i = 0; i < m; ++i) {
        const Vec probs = RelHead::softmax(t.logits.row(i).transpose());
        loss += -std::log(std::max(probs[batch.labels[i]], 1e-300));
        dlogits.row(i) = probs.transpose();
        dlogits(i, batch.labels[i]) -= 1.0;
    }
    loss /= m;

    if (grads) {
        dlogits /= m;
        grads->d_proto += dlogits.transpose() * t.edge_rep;
        grads->d_proto_bias += dlogits.colwise().sum().transpose();
        const Mat d_edge_rep = dlogits * h.prototypes;
        grads->d_edge_W += d_edge_rep.transpose() * t.edge_in;
        grads->d_edge_b += d_edge_rep.colwise().sum().transpose();
        const Mat d_edge_in = d_edge_rep * h.edge.W;

        const Mat d_pair = d_edge_in.leftCols(h.cfg.pair_dim());
        Mat d_nodes = Mat::Zero(t.nodes.rows(), t.nodes.cols());
        if (h.cfg.legacy_fusion) {
            for (int i = 0; i < m; ++i) {
                const auto [si, oi] = batch.pairs[i];
                const Eigen::RowVectorXd s = t.nodes.row(si);
                const Eigen::RowVectorXd o = t.nodes.row(oi);
                const Eigen::RowVectorXd relu_mask =
                    ((s + o).array() > 0.0).cast<double>().matrix();
                const Eigen::RowVectorXd diff = s - o;
                d_nodes.row(si) +=
                    d_pair.row(i).cwiseProduct(relu_mask) - 2.0 * d_pair.row(i).cwiseProduct(diff);
                d_nodes.row(oi) +=
                    d_pair.row(i).cwiseProduct(relu_mask) + 2.0 * d_pair.row(i).cwiseProduct(diff);
            }
        } else {
            grads->d_fuse_W += d_pair.transpose() * t.fuse_in;
            grads->d_fuse_b += d_pair.colwise().sum().transpose();
            const Mat d_fuse_in = d_pair * h.fuse.W;
            for (int i = 0; i < m; ++i) {
                d_nodes.row(batch.pairs[i].first) += d_fuse_in.row(i).head(h.cfg.d_node);
                d_nodes.row(batch.pairs[i].second) += d_fuse_in.row(i).tail(h.cfg.d_node);
            }
        }
        grads->d_node_W += d_nodes.transpose() * batch.node_inputs;
        grads->d_node_b += d_nodes.colwise().sum().transpose();
    }
    return loss;
}

// Ranked relations under the theta_rel product formula. Graph-constraint mode
// emits the argmax predicate per pair; otherwise every predicate enters the
// ranking. Proposal indices must index into the owning graph's detections.
inline std::vector<ScoredRelation> score_relations(const std::vector<Detection>& detections,
                                                   const std::vector<std::pair<int, int>>& pairs,
                                                   const Mat& probs, bool graph_constraint) {
    std::vector<ScoredRelation> rels;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto [si, oi] = pairs[i];
        const Detection& subj = detections[si];
        const Detection& obj = detections[oi];
        auto emit = [&](int p) {
            ScoredRelation r;
            r.subj = subj;
            r.obj = obj;
            r.subj_idx = si;
            r.obj_idx = oi;
            r.pred_id = p;
            r.theta_pred = probs(static_cast<Eigen::Index>(i), p);
            r.theta_rel = relation_score(subj.score, r.theta_pred, obj.score);
            rels.push_back(r);
        };
        if (graph_constraint) {
            int best = 0;
            for (int p = 1; p < probs.cols(); ++p)
                if (probs(static_cast<Eigen::Index>(i), p) > probs(static_cast<Eigen::Index>(i), best))
                    best = p;
            emit(best);
        } else {
            for (int p = 0; p < probs.cols(); ++p) emit(p);
        }
    }
    std::sort(rels.begin(), rels.end(), relation_order);
    return rels;
}

// Matches proposal pairs to ground-truth triplets: a proposal corresponds to
// a GT object when classes agree and IoU >= match_iou; a pair whose endpoints
// both correspond inherits the GT predicate, everything else is background.
inline std::vector<int> pair_labels(const std::vector<Detection>& proposals,
                                    const std::vector<std::pair<int, int>>& pairs,
                                    const ImageRecord& rec, double match_iou) {
    std::vector<int> gt_of(proposals.size(), -1);
    for (std::size_t i = 0; i < proposals.size(); ++i) {
        double best = match_iou;
        for (std::size_t g = 0; g < rec.gt_boxes.size(); ++g) {
            if (rec.gt_classes[g] != proposals[i].class_id) continue;
            const double v = iou(proposals[i].box, rec.gt_boxes[g]);
            if (v >= best) {
                best = v;
                gt_of[i] = static_cast<int>(g);
            }
        }
    }
    std::unordered_map<std::int64_t, int> gt_pred;
    for (const auto& tpl : rec.gt_relations)
        gt_pred.emplace((static_cast<std::int64_t>(tpl.subj_idx) << 32) | tpl.obj_idx, tpl.pred_id);

    std::vector<int> labels;
    labels.reserve(pairs.size());
    const int background = -1;  // resolved by caller to P
    for (const auto& [si, oi] : pairs) {
        int label = background;
        if (gt_of[si] >= 0 && gt_of[oi] >= 0) {
            const auto it =
                gt_pred.find((static_cast<std::int64_t>(gt_of[si]) << 32) | gt_of[oi]);
            if (it != gt_pred.end()) label = it->second;
        }
        labels.push_back(label);
    }
    return labels;
}

}  // namespace sgg::rel
