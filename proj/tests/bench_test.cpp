#include <gtest/gtest.h>

#include <chrono>
#include <thread>

#include "sgg/bench/latency.hpp"
#include "sgg/synth/synth.hpp"

using namespace sgg;
using namespace sgg::bench;

namespace {

rel::StageTimes busy_wait_ms(double ms) {
    const auto t0 = std::chrono::steady_clock::now();
    volatile double sink = 0.0;
    while (std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
               .count() < ms)
        sink += 1.0;
    rel::StageTimes st;
    st.relhead_ms = ms;
    return st;
}

}  // namespace

TEST(Latency, SingleRepHasDegenerateStats) {
    const LatencyStats stats = measure_latency_fn([](int) { return busy_wait_ms(1.0); }, 0, 1);
    EXPECT_DOUBLE_EQ(stats.p50_ms, stats.mean_ms);
    EXPECT_DOUBLE_EQ(stats.p95_ms, stats.mean_ms);
    EXPECT_DOUBLE_EQ(stats.min_ms, stats.max_ms);
    EXPECT_EQ(stats.reps, 1);
    EXPECT_EQ(stats.batch_size, 1);
}

TEST(Latency, ConstantTimeStubHasTightTail) {
    const LatencyStats stats =
        measure_latency_fn([](int) { return busy_wait_ms(2.0); }, 3, 25);
    EXPECT_LE(stats.p50_ms, stats.p95_ms);
    EXPECT_LT(stats.p95_ms / stats.p50_ms, 1.5);
    EXPECT_GE(stats.mean_ms, stats.min_ms);
    EXPECT_LE(stats.mean_ms, stats.max_ms);
}

TEST(Latency, RejectsEmptyInputs) {
    EXPECT_THROW(measure_latency_fn([](int) { return rel::StageTimes{}; }, 0, 0), ConfigError);
}

TEST(CountParams, LinearLayerFormula) {
    Rng rng(1);
    // 256 -> 512 with bias: 256*512 + 512
    const rel::Linear layer = rel::Linear::init(256, 512, rng);
    EXPECT_EQ(layer.param_count(), 131584u);
}

TEST(CountParams, BiasFreePrototypeMatrix) {
    // 10 prototype vectors of dimension 10, no bias in the matrix itself
    rel::RelHeadConfig cfg;
    cfg.num_predicates = 9;  // +1 background row -> 10 x 10
    cfg.d_vis = 4;
    cfg.d_txt = 4;
    cfg.d_node = 4;
    cfg.d_edge = 10;
    std::vector<std::string> names;
    for (int i = 0; i < 3; ++i) names.push_back(synth::class_name(i));
    const rel::RelHead head = rel::RelHead::init(cfg, names);
    const ParamCount pc = count_params(head);
    for (const auto& [name, count] : pc.per_layer)
        if (name == "prototypes") EXPECT_EQ(count, 100u);
}

TEST(CountParams, TotalEqualsPerLayerSum) {
    rel::RelHeadConfig cfg;  // full desk-scale head
    std::vector<std::string> names;
    for (int i = 0; i < 12; ++i) names.push_back(synth::class_name(i));
    const rel::RelHead head = rel::RelHead::init(cfg, names);
    const ParamCount pc = count_params(head);
    std::size_t sum = 0;
    for (const auto& [name, count] : pc.per_layer) sum += count;
    EXPECT_EQ(pc.total, sum);
    // node (320->256), fuse (512->512), edge (524->512), prototypes 7x512 + 7
    EXPECT_EQ(pc.total, (320u * 256 + 256) + (512u * 512 + 512) + (524u * 512 + 512) +
                            7u * 512 + 7u);

    det::DetectorConfig dcfg;
    const det::DetectorModel detector = det::DetectorModel::init(dcfg);
    const ParamCount dpc = count_params(detector);
    std::size_t dsum = 0;
    for (const auto& [name, count] : dpc.per_layer) dsum += count;
    EXPECT_EQ(dpc.total, dsum);
}
