#pragma once

#include <algorithm>
#include <chrono>
#include <vector>

#include <nlohmann/json.hpp>

#include "sgg/core/errors.hpp"
#include "sgg/detector/detector.hpp"
#include "sgg/relhead/pipeline.hpp"

namespace sgg::bench {

// Wall-time statistics over repeated single-image (batch size 1) forward
// passes on a monotonic clock; warmup iterations are excluded.
struct LatencyStats {
    int warmup = 0;
    int reps = 0;
    int batch_size = 1;
    double mean_ms = 0.0;
    double p50_ms = 0.0;
    double p95_ms = 0.0;
    double min_ms = 0.0;
    double max_ms = 0.0;
    // per-stage means
    double detector_ms = 0.0;
    double pooling_ms = 0.0;
    double relhead_ms = 0.0;
    double ranking_ms = 0.0;

    nlohmann::json to_json() const {
        return {{"format", "sgg-lab/1"}, {"kind", "latency_stats"},
                {"warmup", warmup},      {"reps", reps},
                {"batch_size", batch_size}, {"mean_ms", mean_ms},
                {"p50_ms", p50_ms},      {"p95_ms", p95_ms},
                {"min_ms", min_ms},      {"max_ms", max_ms},
                {"stages",
                 {{"detector_ms", detector_ms},
                  {"pooling_ms", pooling_ms},
                  {"relhead_ms", relhead_ms},
                  {"ranking_ms", ranking_ms}}}};
    }
};

inline double percentile(std::vector<double> v, double p) {
    std::sort(v.begin(), v.end());
    const std::size_t idx = static_cast<std::size_t>(
        std::ceil(p * static_cast<double>(v.size())));
    return v[std::min(v.size() - 1, idx == 0 ? 0 : idx - 1)];
}

// Generic harness: fn(sample_index) must run one forward pass and return its
// StageTimes breakdown. End-to-end time is measured around the call itself.
template <typename RunFn>
LatencyStats measure_latency_fn(RunFn&& fn, int warmup, int reps) {
    if (reps < 1) throw ConfigError("measure_latency: reps must be >= 1");
    using clock = std::chrono::steady_clock;
    for (int i = 0; i < warmup; ++i) fn(i);

    LatencyStats stats;
    stats.warmup = warmup;
    stats.reps = reps;
    std::vector<double> samples;
    samples.reserve(reps);
    for (int i = 0; i < reps; ++i) {
        const auto t0 = clock::now();
        const rel::StageTimes st = fn(warmup + i);
        const double ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
        samples.push_back(ms);
        stats.detector_ms += st.detector_ms;
        stats.pooling_ms += st.pooling_ms;
        stats.relhead_ms += st.relhead_ms;
        stats.ranking_ms += st.ranking_ms;
    }
    stats.detector_ms /= reps;
    stats.pooling_ms /= reps;
    stats.relhead_ms /= reps;
    stats.ranking_ms /= reps;
    for (const double s : samples) stats.mean_ms += s;
    stats.mean_ms /= reps;
    stats.p50_ms = percentile(samples, 0.50);
    stats.p95_ms = percentile(samples, 0.95);
    stats.min_ms = *std::min_element(samples.begin(), samples.end());
    stats.max_ms = *std::max_element(samples.begin(), samples.end());
    return stats;
}

// Benchmarks the pipeline at a fixed budget, cycling through the images.
inline LatencyStats measure_latency(const rel::Pipeline& pipeline,
                                    const std::vector<ImageRecord>& images, int k_budget,
                                    int warmup = 10, int reps = 50) {
    if (images.empty()) throw DataError("measure_latency: empty image list");
    return measure_latency_fn(
        [&](int i) { return pipeline.run(images[i % images.size()], k_budget).times; }, warmup,
        reps);
}

struct ParamCount {
    std::vector<std::pair<std::string, std::size_t>> per_layer;
    std::size_t total = 0;

    void add(const std::string& name, std::size_t count) {
        per_layer.emplace_back(name, count);
        total += count;
    }

    nlohmann::json to_json() const {
        nlohmann::json layers = nlohmann::json::object();
        for (const auto& [name, count] : per_layer) layers[name] = count;
        return {{"format", "sgg-lab/1"}, {"kind", "param_count"}, {"total", total}, {"layers", layers}};
    }
};

// Exact count of trainable scalars, broken down per named layer. The fixed
// ROI projector and the frozen embedding table are reported separately and
// excluded from the trainable total by callers that care.
inline ParamCount count_params(const det::DetectorModel& model) {
    ParamCount pc;
    for (const auto& [name, conv] : model.conv_layers()) pc.add(name, conv->param_count());
    return pc;
}

inline ParamCount count_params(const rel::RelHead& head) {
    ParamCount pc;
    for (const auto& [name, count] : head.param_layout()) pc.add(name, count);
    return pc;
}

}  // namespace sgg::bench
