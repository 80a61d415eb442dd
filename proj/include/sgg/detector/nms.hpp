#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "sgg/core/types.hpp"
#include "sgg/metrics/iou.hpp"

namespace sgg::det {

// Greedy class-aware non-maximum suppression. Detections are visited by
// descending score (ties keep input order); a detection survives iff its IoU
// with every kept detection of the same class is <= the threshold. Output is
// sorted by score descending. Idempotent.
inline std::vector<Detection> nms(const std::vector<Detection>& dets,
                                  double iou_threshold = 0.5, bool class_aware = true) {
    std::vector<std::size_t> order(dets.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return dets[a].score > dets[b].score;
    });

    std::vector<Detection> kept;
    kept.reserve(dets.size());
    for (const std::size_t i : order) {
        const Detection& d = dets[i];
        bool suppressed = false;
        for (const Detection& k : kept) {
            if (class_aware && k.class_id != d.class_id) continue;
            if (iou(k.box, d.box) > iou_threshold) {
                suppressed = true;
                break;
            }
        }
        if (!suppressed) kept.push_back(d);
    }
    return kept;
}

}  // namespace sgg::det
