#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sgg/core/errors.hpp"
#include "sgg/core/linalg.hpp"
#include "sgg/core/rng.hpp"

namespace sgg::rel {

// Frozen text-embedding table for object class names. The default table is
// deterministic pseudo-embeddings seeded by a hash of each class name, which
// keeps the text channel meaningful without shipping a GloVe-sized asset.
// An external JSON table {"name": [floats...]} can be loaded instead.
struct EmbeddingTable {
    int dim = 64;
    Mat vectors;  // num_classes x dim

    static EmbeddingTable pseudo(const std::vector<std::string>& class_names, int dim = 64) {
        EmbeddingTable t;
        t.dim = dim;
        t.vectors = Mat::Zero(static_cast<Eigen::Index>(class_names.size()), dim);
        for (std::size_t c = 0; c < class_names.size(); ++c) {
            Rng rng(fnv1a64(class_names[c]));
            for (int d = 0; d < dim; ++d) t.vectors(c, d) = rng.normal() / std::sqrt(double(dim));
        }
        return t;
    }

    static EmbeddingTable load(const std::filesystem::path& path,
                               const std::vector<std::string>& class_names) {
        std::ifstream in(path);
        if (!in) throw MissingArtifactError("cannot open embedding table: " + path.string());
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw DataError("embedding table parse error: " + std::string(e.what()));
        }
        EmbeddingTable t;
        t.dim = -1;
        for (std::size_t c = 0; c < class_names.size(); ++c) {
            const auto& name = class_names[c];
            if (!j.contains(name)) throw DataError("embedding table missing class '" + name + "'");
            const auto v = j.at(name).get<std::vector<double>>();
            if (t.dim < 0) {
                t.dim = static_cast<int>(v.size());
                t.vectors = Mat::Zero(static_cast<Eigen::Index>(class_names.size()), t.dim);
            }
            if (static_cast<int>(v.size()) != t.dim)
                throw DataError("embedding table dimension mismatch for '" + name + "'");
            for (int d = 0; d < t.dim; ++d) t.vectors(static_cast<Eigen::Index>(c), d) = v[d];
        }
        return t;
    }

    Eigen::RowVectorXd embed(int class_id) const {
        if (class_id < 0 || class_id >= vectors.rows())
            throw DataError("embedding table: unknown class_id " + std::to_string(class_id));
        return vectors.row(class_id);
    }
};

}  // namespace sgg::rel
