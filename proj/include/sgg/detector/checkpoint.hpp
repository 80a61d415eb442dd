#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sgg/core/errors.hpp"
#include "sgg/core/linalg.hpp"

namespace sgg {

// Versioned binary weight container: 8-byte magic, u64 little-endian manifest
// length, manifest JSON (format tag, kind, layer shapes, free-form meta),
// then all tensor payloads as little-endian doubles in manifest order.
inline constexpr char kCheckpointMagic[9] = "SGGCKPT1";

struct TensorEntry {
    std::string name;
    std::vector<std::int64_t> shape;
    std::vector<double> values;

    static TensorEntry from_matrix(const std::string& name, const Mat& m) {
        TensorEntry e{name, {m.rows(), m.cols()}, {}};
        e.values.reserve(m.size());
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c) e.values.push_back(m(r, c));
        return e;
    }

    static TensorEntry from_vector(const std::string& name, const Vec& v) {
        TensorEntry e{name, {v.size()}, {v.data(), v.data() + v.size()}};
        return e;
    }

    Mat to_matrix() const {
        if (shape.size() != 2) throw DataError("checkpoint tensor '" + name + "' is not a matrix");
        Mat m(shape[0], shape[1]);
        std::size_t i = 0;
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = values[i++];
        return m;
    }

    Vec to_vector() const {
        if (shape.size() != 1) throw DataError("checkpoint tensor '" + name + "' is not a vector");
        return Eigen::Map<const Vec>(values.data(), static_cast<Eigen::Index>(values.size()));
    }
};

struct Checkpoint {
    std::string kind;
    nlohmann::json meta = nlohmann::json::object();
    std::vector<TensorEntry> tensors;

    const TensorEntry& tensor(const std::string& name) const {
        for (const auto& t : tensors)
            if (t.name == name) return t;
        throw DataError("checkpoint: missing tensor '" + name + "'");
    }
};

inline void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
    nlohmann::json manifest;
    manifest["format"] = "sgg-lab/1";
    manifest["kind"] = ckpt.kind;
    manifest["meta"] = ckpt.meta;
    auto& tensors = manifest["tensors"] = nlohmann::json::array();
    for (const auto& t : ckpt.tensors) tensors.push_back({{"name", t.name}, {"shape", t.shape}});
    const std::string mstr = manifest.dump();

    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write checkpoint: " + path.string());
    out.write(kCheckpointMagic, 8);
    const std::uint64_t mlen = mstr.size();
    out.write(reinterpret_cast<const char*>(&mlen), sizeof(mlen));
    out.write(mstr.data(), static_cast<std::streamsize>(mstr.size()));
    for (const auto& t : ckpt.tensors)
        out.write(reinterpret_cast<const char*>(t.values.data()),
                  static_cast<std::streamsize>(t.values.size() * sizeof(double)));
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingArtifactError("cannot open checkpoint: " + path.string());
    char magic[8];
    in.read(magic, 8);
    if (in.gcount() != 8 || std::memcmp(magic, kCheckpointMagic, 8) != 0)
        throw DataError("not a checkpoint file: " + path.string());
    std::uint64_t mlen = 0;
    in.read(reinterpret_cast<char*>(&mlen), sizeof(mlen));
    std::string mstr(mlen, '\0');
    in.read(mstr.data(), static_cast<std::streamsize>(mlen));

    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(mstr);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("corrupt checkpoint manifest: " + std::string(e.what()));
    }
    if (manifest.value("format", "") != "sgg-lab/1")
        throw DataError("unsupported checkpoint format in " + path.string());

    Checkpoint ckpt;
    ckpt.kind = manifest.value("kind", "");
    ckpt.meta = manifest.value("meta", nlohmann::json::object());
    for (const auto& jt : manifest.at("tensors")) {
        TensorEntry t;
        t.name = jt.at("name").get<std::string>();
        t.shape = jt.at("shape").get<std::vector<std::int64_t>>();
        std::int64_t count = 1;
        for (const auto s : t.shape) count *= s;
        t.values.resize(static_cast<std::size_t>(count));
        in.read(reinterpret_cast<char*>(t.values.data()),
                static_cast<std::streamsize>(t.values.size() * sizeof(double)));
        if (in.gcount() != static_cast<std::streamsize>(t.values.size() * sizeof(double)))
            throw DataError("truncated checkpoint payload in " + path.string());
        ckpt.tensors.push_back(std::move(t));
    }
    return ckpt;
}

}  // namespace sgg
