#pragma once

#include <array>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sgg/core/annotations.hpp"
#include "sgg/core/errors.hpp"
#include "sgg/core/image_io.hpp"
#include "sgg/core/rng.hpp"
#include "sgg/core/types.hpp"
#include "sgg/metrics/iou.hpp"

namespace sgg::synth {

// Fixed predicate vocabulary of the geometric world.
enum Predicate : int {
    kAbove = 0,
    kBelow = 1,
    kLeftOf = 2,
    kRightOf = 3,
    kInside = 4,
    kOverlapping = 5,
};

inline const std::vector<std::string>& predicate_names() {
    static const std::vector<std::string> names = {"above",  "below",  "left_of",
                                                   "right_of", "inside", "overlapping"};
    return names;
}

struct SynthConfig {
    int num_images = 100;
    int num_classes = 12;
    int min_objects = 2;
    int max_objects = 12;
    int image_width = 128;
    int image_height = 128;
    double min_box = 12.0;
    double max_box = 48.0;
    std::uint64_t seed = 0;
    // Probability of deliberately nesting/overlapping a new box with an
    // existing one, so `inside` and `overlapping` stay represented.
    double structured_prob = 0.25;
    // Reject placements whose pair geometry sits on a rule boundary.
    bool clean_margins = true;

    void validate() const {
        if (num_images < 0) throw ConfigError("synth: num_images must be >= 0");
        if (num_classes < 1) throw ConfigError("synth: num_classes must be >= 1");
        if (min_objects < 2) throw ConfigError("synth: objects_per_image min must be >= 2");
        if (max_objects < min_objects) throw ConfigError("synth: objects range empty");
        if (image_width < 32 || image_height < 32) throw ConfigError("synth: image too small");
        if (min_box < 4 || max_box < min_box) throw ConfigError("synth: bad box size range");
    }
};

// subj fully within obj; containment is non-strict so identical boxes count.
inline bool box_inside(const BoundingBox& subj, const BoundingBox& obj) {
    return subj.x1 >= obj.x1 && subj.y1 >= obj.y1 && subj.x2 <= obj.x2 && subj.y2 <= obj.y2;
}

// Deterministic rule set: `inside` dominates, then `overlapping` (IoU > 0.05),
// otherwise exactly one directional predicate chosen by the dominant axis of
// the center-offset vector, ties broken toward horizontal.
inline std::vector<int> predicate_rule(const BoundingBox& subj, const BoundingBox& obj) {
    if (box_inside(subj, obj)) return {kInside};
    if (iou(subj, obj) > 0.05) return {kOverlapping};
    const double dx = obj.center_x() - subj.center_x();
    const double dy = obj.center_y() - subj.center_y();
    if (std::abs(dx) >= std::abs(dy)) return {dx >= 0.0 ? kLeftOf : kRightOf};
    return {dy > 0.0 ? kAbove : kBelow};
}

// Class-id color, exact byte values; 12 handpicked, extended by hue walk.
inline std::array<double, 3> class_color(int class_id) {
    static const std::array<std::array<int, 3>, 12> base = {{{220, 40, 40},
                                                             {40, 180, 60},
                                                             {50, 80, 220},
                                                             {230, 210, 40},
                                                             {210, 50, 200},
                                                             {40, 200, 210},
                                                             {240, 140, 30},
                                                             {130, 50, 190},
                                                             {30, 130, 120},
                                                             {150, 160, 40},
                                                             {140, 40, 70},
                                                             {40, 60, 120}}};
    if (class_id < 12) {
        const auto& c = base[class_id];
        return {c[0] / 255.0, c[1] / 255.0, c[2] / 255.0};
    }
    // Golden-ratio hue walk for synthetic vocabularies beyond 12 classes.
    const double h = std::fmod(0.618033988749895 * class_id, 1.0) * 6.0;
    const int i = static_cast<int>(h);
    const double f = h - i;
    const double q = 1.0 - f;
    double r = 0, g = 0, b = 0;
    switch (i % 6) {
        case 0: r = 1; g = f; break;
        case 1: r = q; g = 1; break;
        case 2: g = 1; b = f; break;
        case 3: g = q; b = 1; break;
        case 4: r = f; b = 1; break;
        default: r = 1; b = q; break;
    }
    auto byte = [](double v) { return std::round(40.0 + v * 200.0) / 255.0; };
    return {byte(r), byte(g), byte(b)};
}

inline const std::array<std::string, 3>& shape_names() {
    static const std::array<std::string, 3> names = {"rectangle", "ellipse", "diamond"};
    return names;
}

inline std::string class_name(int class_id) {
    static const std::array<std::string, 12> colors = {"red",    "green",  "blue",   "yellow",
                                                       "magenta", "cyan",  "orange", "purple",
                                                       "teal",   "olive",  "maroon", "navy"};
    const std::string color =
        class_id < 12 ? colors[class_id] : "class" + std::to_string(class_id);
    return color + "_" + shape_names()[class_id % 3];
}

inline DatasetVocab make_vocab(int num_classes) {
    DatasetVocab vocab;
    for (int c = 0; c < num_classes; ++c) vocab.categories.push_back(class_name(c));
    vocab.predicates = predicate_names();
    return vocab;
}

// Paints objects in placement order; later objects overpaint earlier ones.
inline Image render_scene(int width, int height, const std::vector<BoundingBox>& boxes,
                          const std::vector<int>& classes) {
    Image img = Image::filled(width, height, 3, 1.0);
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        const BoundingBox& b = boxes[i];
        const auto color = class_color(classes[i]);
        const int shape = classes[i] % 3;
        const double cx = b.center_x(), cy = b.center_y();
        const double rx = 0.5 * b.width(), ry = 0.5 * b.height();
        const int y0 = std::max(0, static_cast<int>(std::floor(b.y1)));
        const int y1 = std::min(height, static_cast<int>(std::ceil(b.y2)));
        const int x0 = std::max(0, static_cast<int>(std::floor(b.x1)));
        const int x1 = std::min(width, static_cast<int>(std::ceil(b.x2)));
        for (int y = y0; y < y1; ++y) {
            for (int x = x0; x < x1; ++x) {
                const double px = x + 0.5, py = y + 0.5;
                bool hit = false;
                switch (shape) {
                    case 0:
                        hit = px >= b.x1 && px < b.x2 && py >= b.y1 && py < b.y2;
                        break;
                    case 1: {
                        const double nx = (px - cx) / rx, ny = (py - cy) / ry;
                        hit = nx * nx + ny * ny <= 1.0;
                        break;
                    }
                    default: {
                        const double nx = std::abs(px - cx) / rx, ny = std::abs(py - cy) / ry;
                        hit = nx + ny <= 1.0;
                        break;
                    }
                }
                if (hit)
                    for (int c = 0; c < 3; ++c) img.at(y, x, c) = color[c];
            }
        }
    }
    return img;
}

namespace detail {

// Containment margins of a into b (all >= 0 iff a inside b).
inline std::array<double, 4> containment_margins(const BoundingBox& a, const BoundingBox& b) {
    return {a.x1 - b.x1, a.y1 - b.y1, b.x2 - a.x2, b.y2 - a.y2};
}

// A pair is "clean" when its predicate under the rule is robust: clear
// containment, clear overlap, or a clearly dominant offset axis. Keeps the
// generated world away from rule boundaries without touching the labels.
inline bool pair_is_clean(const BoundingBox& a, const BoundingBox& b) {
    auto min_margin = [](const BoundingBox& s, const BoundingBox& o) {
        const auto m = containment_margins(s, o);
        return std::min(std::min(m[0], m[1]), std::min(m[2], m[3]));
    };
    auto one_way = [&](const BoundingBox& s, const BoundingBox& o) {
        if (box_inside(s, o)) {
            const auto m = containment_margins(s, o);
            for (double v : m)
                if (v < 2.0) return false;
            return s.area() <= 0.8 * o.area();
        }
        const double v = iou(s, o);
        // clear overlap: not near the IoU threshold, and partial overlaps
        // must protrude clearly (full reverse containment stays legal)
        if (v > 0.05)
            return v >= 0.12 && (box_inside(o, s) ||
                                 (min_margin(s, o) <= -3.0 && min_margin(o, s) <= -3.0));
        if (v > 0.02) return false;  // grazing contact, too close to the threshold
        const double dx = std::abs(o.center_x() - s.center_x());
        const double dy = std::abs(o.center_y() - s.center_y());
        const double hi = std::max(dx, dy);
        return hi > 1e-9 && std::abs(dx - dy) >= 0.2 * hi;
    };
    return one_way(a, b) && one_way(b, a);
}

inline bool placement_ok(const BoundingBox& cand, int cand_class,
                         const std::vector<BoundingBox>& boxes, const std::vector<int>& classes,
                         bool clean_margins) {
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        // Same-class near-duplicates would be eaten by class-aware NMS.
        if (classes[i] == cand_class && iou(cand, boxes[i]) > 0.35) return false;
        if (clean_margins && !pair_is_clean(cand, boxes[i])) return false;
    }
    return true;
}

}  // namespace detail

// Generates the geometric-relations world. Ground truth relations are the
// rule applied to every ordered object pair, so an independent re-run of
// predicate_rule reproduces the annotations exactly.
inline std::vector<ImageRecord> generate_dataset(const SynthConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    std::vector<ImageRecord> records;
    records.reserve(cfg.num_images);

    for (int idx = 0; idx < cfg.num_images; ++idx) {
        ImageRecord rec;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "synth_%06d", idx);
        rec.image_id = buf;
        rec.width = cfg.image_width;
        rec.height = cfg.image_height;

        const int target = rng.uniform_int(cfg.min_objects, cfg.max_objects);
        for (int slot = 0; slot < target; ++slot) {
            const bool must_place = static_cast<int>(rec.gt_boxes.size()) < cfg.min_objects;
            const int tries = must_place ? 1000 : 60;
            for (int t = 0; t < tries; ++t) {
                BoundingBox cand;
                const bool structured = !rec.gt_boxes.empty() && rng.uniform() < cfg.structured_prob;
                if (structured) {
                    const int parent_idx = rng.uniform_int(0, static_cast<int>(rec.gt_boxes.size()) - 1);
                    const BoundingBox& p = rec.gt_boxes[parent_idx];
                    if (rng.uniform() < 0.5 && p.width() >= 20.0 && p.height() >= 20.0) {
                        // nested child, margins kept well clear of the boundary
                        const double w = rng.uniform(0.35, 0.6) * p.width();
                        const double h = rng.uniform(0.35, 0.6) * p.height();
                        const double x = rng.uniform(p.x1 + 3.0, p.x2 - w - 3.0);
                        const double y = rng.uniform(p.y1 + 3.0, p.y2 - h - 3.0);
                        cand = {x, y, x + w, y + h};
                    } else {
                        // partial overlap, shifted along one axis
                        const double w = rng.uniform(cfg.min_box, cfg.max_box);
                        const double h = rng.uniform(cfg.min_box, cfg.max_box);
                        const bool horiz = rng.uniform() < 0.5;
                        const double fx = rng.uniform(0.4, 0.7);
                        const double x = horiz ? p.x1 + fx * p.width() : p.x1 + rng.uniform(-0.2, 0.2) * p.width();
                        const double y = horiz ? p.y1 + rng.uniform(-0.2, 0.2) * p.height() : p.y1 + fx * p.height();
                        cand = {x, y, x + w, y + h};
                    }
                } else {
                    const double w = rng.uniform(cfg.min_box, cfg.max_box);
                    const double h = rng.uniform(cfg.min_box, cfg.max_box);
                    const double x = rng.uniform(0.0, cfg.image_width - w);
                    const double y = rng.uniform(0.0, cfg.image_height - h);
                    cand = {x, y, x + w, y + h};
                }
                if (cand.x1 < 0 || cand.y1 < 0 || cand.x2 > cfg.image_width ||
                    cand.y2 > cfg.image_height || cand.width() < 4 || cand.height() < 4)
                    continue;
                const int cls = rng.uniform_int(0, cfg.num_classes - 1);
                if (!detail::placement_ok(cand, cls, rec.gt_boxes, rec.gt_classes, cfg.clean_margins))
                    continue;
                rec.gt_boxes.push_back(cand);
                rec.gt_classes.push_back(cls);
                break;
            }
        }

        const int n = static_cast<int>(rec.gt_boxes.size());
        for (int s = 0; s < n; ++s)
            for (int o = 0; o < n; ++o) {
                if (s == o) continue;
                const auto preds = predicate_rule(rec.gt_boxes[s], rec.gt_boxes[o]);
                rec.gt_relations.push_back({s, preds.front(), o});
            }

        rec.image = render_scene(cfg.image_width, cfg.image_height, rec.gt_boxes, rec.gt_classes);
        records.push_back(std::move(rec));
    }
    return records;
}

inline nlohmann::json config_to_json(const SynthConfig& cfg) {
    return {{"num_images", cfg.num_images},
            {"num_classes", cfg.num_classes},
            {"min_objects", cfg.min_objects},
            {"max_objects", cfg.max_objects},
            {"image_width", cfg.image_width},
            {"image_height", cfg.image_height},
            {"min_box", cfg.min_box},
            {"max_box", cfg.max_box},
            {"seed", cfg.seed},
            {"structured_prob", cfg.structured_prob},
            {"clean_margins", cfg.clean_margins}};
}

// Lays out a dataset directory: annotations.json, images/<id>.ppm and a
// seed/config manifest.
inline void write_dataset(const std::vector<ImageRecord>& records, const SynthConfig& cfg,
                          const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir / "images");
    AnnotationDataset ds;
    ds.vocab = make_vocab(cfg.num_classes);
    ds.records = records;
    save_annotations(ds, dir / "annotations.json");
    for (const auto& rec : records)
        if (!rec.image.empty()) write_ppm(rec.image, dir / "images" / (rec.image_id + ".ppm"));

    nlohmann::json manifest = {{"format", kFormatTag},
                               {"kind", "synth_manifest"},
                               {"config", config_to_json(cfg)}};
    std::ofstream out(dir / "manifest.json");
    if (!out) throw DataError("cannot write manifest in " + dir.string());
    out << manifest.dump(2) << "\n";
}

// Loads a dataset directory written by write_dataset, attaching pixels when
// image files are present.
inline AnnotationDataset load_dataset_dir(const std::filesystem::path& dir) {
    AnnotationDataset ds = load_annotation_file(dir / "annotations.json");
    for (auto& rec : ds.records) {
        const auto img_path = dir / "images" / (rec.image_id + ".ppm");
        if (std::filesystem::exists(img_path)) rec.image = read_ppm(img_path);
    }
    return ds;
}

}  // namespace sgg::synth
