#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "sgg/core/types.hpp"

namespace sgg {

namespace detail {
inline bool finite_box(const BoundingBox& b) {
    return std::isfinite(b.x1) && std::isfinite(b.y1) && std::isfinite(b.x2) &&
           std::isfinite(b.y2);
}
}  // namespace detail

// Reports every invariant violation in a record. Pure and total: violations
// are returned as data, never thrown, whatever the field values are.
// num_classes / num_predicates < 0 skip the respective range checks.
inline std::vector<std::string> validate_record(const ImageRecord& rec,
                                                int num_classes = -1,
                                                int num_predicates = -1) {
    std::vector<std::string> out;
    const std::string id = rec.image_id.empty() ? "<unnamed>" : rec.image_id;
    auto add = [&](const std::string& msg) { out.push_back(id + ": " + msg); };

    if (rec.width <= 0 || rec.height <= 0) add("non-positive image size");
    if (rec.gt_boxes.size() != rec.gt_classes.size())
        add("gt_boxes count " + std::to_string(rec.gt_boxes.size()) +
            " != gt_classes count " + std::to_string(rec.gt_classes.size()));

    for (std::size_t i = 0; i < rec.gt_boxes.size(); ++i) {
        const BoundingBox& b = rec.gt_boxes[i];
        const std::string tag = "box " + std::to_string(i);
        if (!detail::finite_box(b)) {
            add(tag + ": non-finite coordinate");
            continue;
        }
        if (!(b.x1 < b.x2) || !(b.y1 < b.y2)) add(tag + ": degenerate (needs x1 < x2 and y1 < y2)");
        if (b.x1 < 0 || b.y1 < 0 || b.x2 > rec.width || b.y2 > rec.height)
            add(tag + ": outside image bounds");
    }

    for (std::size_t i = 0; i < rec.gt_classes.size(); ++i) {
        const int c = rec.gt_classes[i];
        if (c < 0 || (num_classes >= 0 && c >= num_classes))
            add("class " + std::to_string(i) + ": id " + std::to_string(c) + " out of range");
    }

    const int n = static_cast<int>(rec.gt_boxes.size());
    for (std::size_t i = 0; i < rec.gt_relations.size(); ++i) {
        const RelationTriplet& t = rec.gt_relations[i];
        const std::string tag = "relation " + std::to_string(i);
        if (t.subj_idx < 0 || t.subj_idx >= n) add(tag + ": subj_idx " + std::to_string(t.subj_idx) + " dangling");
        if (t.obj_idx < 0 || t.obj_idx >= n) add(tag + ": obj_idx " + std::to_string(t.obj_idx) + " dangling");
        if (t.subj_idx == t.obj_idx) add(tag + ": self-relation (subj_idx == obj_idx)");
        if (t.pred_id < 0 || (num_predicates >= 0 && t.pred_id >= num_predicates))
            add(tag + ": pred_id " + std::to_string(t.pred_id) + " out of range");
    }

    if (!rec.image.empty()) {
        if (rec.image.width != rec.width || rec.image.height != rec.height)
            add("image payload size mismatch");
        if (rec.image.data.size() != static_cast<std::size_t>(rec.image.width) *
                                         rec.image.height * rec.image.channels)
            add("image payload buffer size mismatch");
    }
    return out;
}

}  // namespace sgg
