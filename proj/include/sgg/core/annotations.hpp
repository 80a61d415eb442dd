#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sgg/core/errors.hpp"
#include "sgg/core/types.hpp"
#include "sgg/core/validate.hpp"

namespace sgg {

inline constexpr const char* kFormatTag = "sgg-lab/1";

struct DatasetVocab {
    std::vector<std::string> categories;
    std::vector<std::string> predicates;

    int num_classes() const { return static_cast<int>(categories.size()); }
    int num_predicates() const { return static_cast<int>(predicates.size()); }
};

struct AnnotationDataset {
    DatasetVocab vocab;
    std::vector<ImageRecord> records;
};

namespace detail {

template <typename T>
T require_field(const nlohmann::json& j, const char* key, const std::string& ctx) {
    if (!j.contains(key))
        throw DataError("annotation parse error at " + ctx + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError("annotation parse error at " + ctx + ": bad field '" + key + "': " + e.what());
    }
}

}  // namespace detail

// Annotation file: a single JSON document,
// {"format": "sgg-lab/1", "categories": [...], "predicates": [...],
//  "images": [{"image_id", "width", "height", "boxes", "classes", "relations"}]}
inline AnnotationDataset load_annotation_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingArtifactError("cannot open annotation file: " + path.string());

    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("annotation parse error in " + path.string() + ": " + e.what());
    }

    if (detail::require_field<std::string>(j, "format", "<root>") != kFormatTag)
        throw DataError("annotation file " + path.string() + ": unsupported format tag");

    AnnotationDataset ds;
    ds.vocab.categories = detail::require_field<std::vector<std::string>>(j, "categories", "<root>");
    ds.vocab.predicates = detail::require_field<std::vector<std::string>>(j, "predicates", "<root>");

    for (const auto& ji : detail::require_field<nlohmann::json>(j, "images", "<root>")) {
        ImageRecord rec;
        rec.image_id = detail::require_field<std::string>(ji, "image_id", "image entry");
        const std::string ctx = "image '" + rec.image_id + "'";
        rec.width = detail::require_field<int>(ji, "width", ctx);
        rec.height = detail::require_field<int>(ji, "height", ctx);
        for (const auto& jb : detail::require_field<nlohmann::json>(ji, "boxes", ctx)) {
            if (!jb.is_array() || jb.size() != 4)
                throw DataError("annotation parse error at " + ctx + ": field 'boxes' entries must be [x1,y1,x2,y2]");
            rec.gt_boxes.push_back({jb[0].get<double>(), jb[1].get<double>(),
                                    jb[2].get<double>(), jb[3].get<double>()});
        }
        rec.gt_classes = detail::require_field<std::vector<int>>(ji, "classes", ctx);
        for (const auto& jr : detail::require_field<nlohmann::json>(ji, "relations", ctx)) {
            if (!jr.is_array() || jr.size() != 3)
                throw DataError("annotation parse error at " + ctx + ": field 'relations' entries must be [s,p,o]");
            rec.gt_relations.push_back({jr[0].get<int>(), jr[1].get<int>(), jr[2].get<int>()});
        }

        const auto violations =
            validate_record(rec, ds.vocab.num_classes(), ds.vocab.num_predicates());
        if (!violations.empty()) {
            std::string msg = "annotation validation failed:";
            for (const auto& v : violations) msg += "\n  " + v;
            throw DataError(msg);
        }
        ds.records.push_back(std::move(rec));
    }

    std::stable_sort(ds.records.begin(), ds.records.end(),
                     [](const ImageRecord& a, const ImageRecord& b) { return a.image_id < b.image_id; });
    return ds;
}

inline std::vector<ImageRecord> load_annotations(const std::filesystem::path& path) {
    return load_annotation_file(path).records;
}

inline nlohmann::json record_to_json(const ImageRecord& rec) {
    nlohmann::json ji;
    ji["image_id"] = rec.image_id;
    ji["width"] = rec.width;
    ji["height"] = rec.height;
    auto& boxes = ji["boxes"] = nlohmann::json::array();
    for (const auto& b : rec.gt_boxes) boxes.push_back({b.x1, b.y1, b.x2, b.y2});
    ji["classes"] = rec.gt_classes;
    auto& rels = ji["relations"] = nlohmann::json::array();
    for (const auto& t : rec.gt_relations) rels.push_back({t.subj_idx, t.pred_id, t.obj_idx});
    return ji;
}

inline void save_annotations(const AnnotationDataset& ds, const std::filesystem::path& path) {
    nlohmann::json j;
    j["format"] = kFormatTag;
    j["categories"] = ds.vocab.categories;
    j["predicates"] = ds.vocab.predicates;
    auto& images = j["images"] = nlohmann::json::array();
    for (const auto& rec : ds.records) images.push_back(record_to_json(rec));

    std::ofstream out(path);
    if (!out) throw DataError("cannot write annotation file: " + path.string());
    out << j.dump(2) << "\n";
}

}  // namespace sgg
