#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

namespace sgg {

// Corner-format box in image coordinates, origin top-left, y growing down.
struct BoundingBox {
    double x1 = 0.0;
    double y1 = 0.0;
    double x2 = 0.0;
    double y2 = 0.0;

    double width() const { return x2 - x1; }
    double height() const { return y2 - y1; }
    double area() const { return width() * height(); }
    double center_x() const { return 0.5 * (x1 + x2); }
    double center_y() const { return 0.5 * (y1 + y2); }

    bool operator==(const BoundingBox&) const = default;
};

struct Detection {
    BoundingBox box;
    int class_id = 0;
    double score = 0.0;

    bool operator==(const Detection&) const = default;
};

// <subject, predicate, object> with indices into an image's object list.
struct RelationTriplet {
    int subj_idx = 0;
    int pred_id = 0;
    int obj_idx = 0;

    bool operator==(const RelationTriplet&) const = default;
};

// Dense H x W x C grid, row-major (y, x, c), values in [0, 1].
struct Image {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<double> data;

    bool empty() const { return data.empty(); }

    double at(int y, int x, int c) const {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    double& at(int y, int x, int c) {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }

    static Image filled(int w, int h, int c, double value) {
        Image img;
        img.width = w;
        img.height = h;
        img.channels = c;
        img.data.assign(static_cast<std::size_t>(w) * h * c, value);
        return img;
    }

    bool operator==(const Image&) const = default;
};

// Dataset atom: ground truth annotations plus an optional pixel payload.
struct ImageRecord {
    std::string image_id;
    int width = 0;
    int height = 0;
    std::vector<BoundingBox> gt_boxes;
    std::vector<int> gt_classes;
    std::vector<RelationTriplet> gt_relations;
    Image image;

    bool operator==(const ImageRecord&) const = default;
};

// One ranked relation prediction. theta_rel must always equal
// subj.score * theta_pred * obj.score, bit-exactly.
struct ScoredRelation {
    Detection subj;
    Detection obj;
    int subj_idx = 0;  // index into the owning SceneGraph's detections
    int obj_idx = 0;
    int pred_id = 0;
    double theta_pred = 0.0;
    double theta_rel = 0.0;

    bool operator==(const ScoredRelation&) const = default;
};

// Ordering contract: theta_rel descending, ties broken by
// (subj_idx, obj_idx, pred_id) ascending so rankings are reproducible.
inline bool relation_order(const ScoredRelation& a, const ScoredRelation& b) {
    if (a.theta_rel != b.theta_rel) return a.theta_rel > b.theta_rel;
    return std::tie(a.subj_idx, a.obj_idx, a.pred_id) <
           std::tie(b.subj_idx, b.obj_idx, b.pred_id);
}

struct SceneGraph {
    std::string image_id;
    std::vector<Detection> detections;
    std::vector<ScoredRelation> relations;  // kept sorted by relation_order

    void sort_relations() {
        std::sort(relations.begin(), relations.end(), relation_order);
    }

    bool operator==(const SceneGraph&) const = default;
};

}  // namespace sgg
