#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sgg/core/errors.hpp"
#include "sgg/core/rng.hpp"

namespace sgg::cli {

// Flat key-value run configuration with dotted section keys. Files hold
// `key = value` lines ('#' comments); command-line --set overrides win.
// Unknown keys are rejected up front so manifests stay trustworthy.
class RunConfig {
public:
    RunConfig() { values_ = defaults(); }

    static const std::map<std::string, std::string>& defaults() {
        static const std::map<std::string, std::string> d = {
            {"run.seed", "0"},
            {"run.out_dir", "out"},
            {"dataset.dir", ""},
            {"detector.mode", "perfect"},
            {"detector.checkpoint", ""},
            {"detector.sigma_px", "2.0"},
            {"detector.score_thresh", "0.3"},
            {"detector.canonical_box", "56"},
            {"detector.nms_iou", "0.5"},
            {"relhead.checkpoint", ""},
            {"relhead.legacy_fusion", "false"},
            {"relhead.extended_spatial", "false"},
            {"relhead.graph_constraint", "true"},
            {"ablation.text", "true"},
            {"ablation.visual", "true"},
            {"ablation.spatial", "true"},
            {"ablation.union", "false"},
            {"model.d_vis", "256"},
            {"model.d_txt", "64"},
            {"model.d_node", "256"},
            {"model.d_edge", "512"},
            {"model.pool_size", "7"},
            {"model.pyramid_channels", "64"},
            {"train.epochs", "20"},
            {"train.lr", "0.001"},
            {"train.batch", "8"},
            {"train.theta", "100"},
            {"eval.ks", "20,50,100"},
            {"eval.k_budget", "100"},
            {"dcs.epsilon", "1e-5"},
            {"dcs.theta", "100"},
            {"dcs.grid_step", "5"},
            {"dcs.smooth_window", "0"},
            {"bench.warmup", "10"},
            {"bench.reps", "50"},
            {"bench.budgets", "10,50,100,150"},
            {"bench.max_images", "20"},
            {"synth.num_images", "100"},
            {"synth.num_classes", "12"},
            {"synth.min_objects", "2"},
            {"synth.max_objects", "12"},
            {"synth.image_size", "128"},
            {"synth.min_box", "12"},
            {"synth.max_box", "48"},
            {"synth.structured_prob", "0.25"},
            {"synth.clean_margins", "true"},
        };
        return d;
    }

    void set(const std::string& key, const std::string& value) {
        if (!defaults().count(key)) throw ConfigError("unknown config key: " + key);
        values_[key] = value;
    }

    void load_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            const auto trim = [](std::string s) {
                const auto b = s.find_first_not_of(" \t\r");
                const auto e = s.find_last_not_of(" \t\r");
                return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
            };
            line = trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
            set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        }
    }

    const std::string& str(const std::string& key) const {
        const auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError("unknown config key: " + key);
        return it->second;
    }

    int integer(const std::string& key) const {
        try {
            std::size_t pos = 0;
            const int v = std::stoi(str(key), &pos);
            if (pos != str(key).size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw ConfigError("config key " + key + ": expected integer, got '" + str(key) + "'");
        }
    }

    double number(const std::string& key) const {
        try {
            std::size_t pos = 0;
            const double v = std::stod(str(key), &pos);
            if (pos != str(key).size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw ConfigError("config key " + key + ": expected number, got '" + str(key) + "'");
        }
    }

    bool boolean(const std::string& key) const {
        const std::string& v = str(key);
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw ConfigError("config key " + key + ": expected boolean, got '" + v + "'");
    }

    std::uint64_t seed(const std::string& key = "run.seed") const {
        try {
            return std::stoull(str(key));
        } catch (const std::exception&) {
            throw ConfigError("config key " + key + ": expected unsigned integer");
        }
    }

    std::vector<int> int_list(const std::string& key) const {
        std::vector<int> out;
        std::stringstream ss(str(key));
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                out.push_back(std::stoi(tok));
            } catch (const std::exception&) {
                throw ConfigError("config key " + key + ": expected comma-separated integers");
            }
        }
        if (out.empty()) throw ConfigError("config key " + key + ": empty list");
        return out;
    }

    nlohmann::json to_json() const {
        nlohmann::json j = nlohmann::json::object();
        for (const auto& [k, v] : values_) j[k] = v;
        return j;
    }

    // FNV-1a over the canonical sorted key=value serialization.
    std::string hash() const {
        std::string canon;
        for (const auto& [k, v] : values_) canon += k + "=" + v + "\n";
        char buf[17];
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(fnv1a64(canon)));
        return buf;
    }

private:
    std::map<std::string, std::string> values_;
};

}  // namespace sgg::cli
