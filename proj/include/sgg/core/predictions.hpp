#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sgg/core/annotations.hpp"
#include "sgg/core/errors.hpp"
#include "sgg/core/types.hpp"

namespace sgg {

namespace detail {

inline nlohmann::json detection_to_json(const Detection& d) {
    return {{"box", {d.box.x1, d.box.y1, d.box.x2, d.box.y2}},
            {"class_id", d.class_id},
            {"score", d.score}};
}

inline Detection detection_from_json(const nlohmann::json& j) {
    Detection d;
    const auto& b = j.at("box");
    d.box = {b.at(0).get<double>(), b.at(1).get<double>(), b.at(2).get<double>(),
             b.at(3).get<double>()};
    d.class_id = j.at("class_id").get<int>();
    d.score = j.at("score").get<double>();
    return d;
}

}  // namespace detail

inline nlohmann::json scene_graph_to_json(const SceneGraph& g) {
    nlohmann::json j;
    j["format"] = kFormatTag;
    j["image_id"] = g.image_id;
    auto& dets = j["detections"] = nlohmann::json::array();
    for (const auto& d : g.detections) dets.push_back(detail::detection_to_json(d));
    auto& rels = j["relations"] = nlohmann::json::array();
    for (const auto& r : g.relations) {
        rels.push_back({{"subj", detail::detection_to_json(r.subj)},
                        {"obj", detail::detection_to_json(r.obj)},
                        {"subj_idx", r.subj_idx},
                        {"obj_idx", r.obj_idx},
                        {"pred_id", r.pred_id},
                        {"theta_pred", r.theta_pred},
                        {"theta_rel", r.theta_rel}});
    }
    return j;
}

inline SceneGraph scene_graph_from_json(const nlohmann::json& j) {
    SceneGraph g;
    try {
        if (j.at("format").get<std::string>() != kFormatTag)
            throw DataError("prediction line: unsupported format tag");
        g.image_id = j.at("image_id").get<std::string>();
        for (const auto& jd : j.at("detections")) g.detections.push_back(detail::detection_from_json(jd));
        for (const auto& jr : j.at("relations")) {
            ScoredRelation r;
            r.subj = detail::detection_from_json(jr.at("subj"));
            r.obj = detail::detection_from_json(jr.at("obj"));
            r.subj_idx = jr.at("subj_idx").get<int>();
            r.obj_idx = jr.at("obj_idx").get<int>();
            r.pred_id = jr.at("pred_id").get<int>();
            r.theta_pred = jr.at("theta_pred").get<double>();
            r.theta_rel = jr.at("theta_rel").get<double>();
            g.relations.push_back(r);
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed prediction entry: ") + e.what());
    }
    return g;
}

// Prediction file: JSON-lines, one SceneGraph per line. nlohmann emits
// shortest round-trip doubles, so load(save(x)) == x bit-exactly.
inline void save_predictions(const std::vector<SceneGraph>& graphs,
                             const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write prediction file: " + path.string());
    for (const auto& g : graphs) out << scene_graph_to_json(g).dump() << "\n";
}

inline std::vector<SceneGraph> load_predictions(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingArtifactError("cannot open prediction file: " + path.string());
    std::vector<SceneGraph> graphs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw DataError("malformed prediction file " + path.string() + " line " +
                            std::to_string(lineno) + ": " + e.what());
        }
        graphs.push_back(scene_graph_from_json(j));
    }
    return graphs;
}

}  // namespace sgg
