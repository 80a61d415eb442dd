#include <gtest/gtest.h>

#include <cmath>

#include "oracle/oracle.hpp"
#include "sgg/metrics/metrics.hpp"
#include "sgg/synth/synth.hpp"

using namespace sgg;
using namespace sgg::metrics;

namespace {

// Randomized evaluation fixture: ground truth plus a prediction graph that
// mixes true triplets, wrong predicates, jittered boxes and pure noise.
struct Fixture {
    ImageRecord record;
    SceneGraph graph;
};

Fixture random_fixture(Rng& rng, const std::string& id, int num_classes = 5,
                       int num_predicates = 6) {
    Fixture fx;
    fx.record.image_id = id;
    fx.record.width = 128;
    fx.record.height = 128;
    const int n = rng.uniform_int(2, 10);
    for (int i = 0; i < n; ++i) {
        const double w = rng.uniform(8, 40), h = rng.uniform(8, 40);
        const double x = rng.uniform(0, 128 - w), y = rng.uniform(0, 128 - h);
        fx.record.gt_boxes.push_back({x, y, x + w, y + h});
        fx.record.gt_classes.push_back(rng.uniform_int(0, num_classes - 1));
    }
    const int num_rel = rng.uniform_int(1, 20);
    for (int r = 0; r < num_rel; ++r) {
        const int s = rng.uniform_int(0, n - 1);
        int o = rng.uniform_int(0, n - 1);
        if (s == o) o = (o + 1) % n;
        fx.record.gt_relations.push_back({s, rng.uniform_int(0, num_predicates - 1), o});
    }

    // predicted detections: jittered copies of GT (some dropped) + clutter
    std::vector<int> det_of_gt(n, -1);
    for (int i = 0; i < n; ++i) {
        if (rng.uniform() < 0.15) continue;  // miss
        BoundingBox b = fx.record.gt_boxes[i];
        const double j = rng.uniform(0, 3);
        b.x1 = std::max(0.0, b.x1 + rng.uniform(-j, j));
        b.y1 = std::max(0.0, b.y1 + rng.uniform(-j, j));
        b.x2 = std::min(128.0, std::max(b.x1 + 2, b.x2 + rng.uniform(-j, j)));
        b.y2 = std::min(128.0, std::max(b.y1 + 2, b.y2 + rng.uniform(-j, j)));
        det_of_gt[i] = static_cast<int>(fx.graph.detections.size());
        fx.graph.detections.push_back({b, fx.record.gt_classes[i], rng.uniform(0.3, 1.0)});
    }
    const int clutter = rng.uniform_int(0, 4);
    for (int c = 0; c < clutter; ++c) {
        const double w = rng.uniform(8, 30), h = rng.uniform(8, 30);
        const double x = rng.uniform(0, 128 - w), y = rng.uniform(0, 128 - h);
        fx.graph.detections.push_back(
            {{x, y, x + w, y + h}, rng.uniform_int(0, num_classes - 1), rng.uniform(0.1, 0.9)});
    }
    fx.graph.image_id = id;

    // predicted relations: GT copies (sometimes wrong predicate) + noise
    const int nd = static_cast<int>(fx.graph.detections.size());
    for (const auto& t : fx.record.gt_relations) {
        if (rng.uniform() < 0.25) continue;
        if (det_of_gt[t.subj_idx] < 0 || det_of_gt[t.obj_idx] < 0) continue;
        ScoredRelation r;
        r.subj_idx = det_of_gt[t.subj_idx];
        r.obj_idx = det_of_gt[t.obj_idx];
        r.subj = fx.graph.detections[r.subj_idx];
        r.obj = fx.graph.detections[r.obj_idx];
        r.pred_id = rng.uniform() < 0.8 ? t.pred_id : rng.uniform_int(0, num_predicates - 1);
        r.theta_pred = rng.uniform(0.2, 1.0);
        r.theta_rel = r.subj.score * r.theta_pred * r.obj.score;
        fx.graph.relations.push_back(r);
    }
    if (nd >= 2) {
        const int noise = rng.uniform_int(0, 10);
        for (int i = 0; i < noise; ++i) {
            ScoredRelation r;
            r.subj_idx = rng.uniform_int(0, nd - 1);
            r.obj_idx = rng.uniform_int(0, nd - 1);
            if (r.subj_idx == r.obj_idx) continue;
            r.subj = fx.graph.detections[r.subj_idx];
            r.obj = fx.graph.detections[r.obj_idx];
            r.pred_id = rng.uniform_int(0, num_predicates - 1);
            r.theta_pred = rng.uniform();
            r.theta_rel = r.subj.score * r.theta_pred * r.obj.score;
            fx.graph.relations.push_back(r);
        }
    }
    fx.graph.sort_relations();
    return fx;
}

SceneGraph perfect_graph(const ImageRecord& rec) {
    SceneGraph g;
    g.image_id = rec.image_id;
    for (std::size_t i = 0; i < rec.gt_boxes.size(); ++i)
        g.detections.push_back({rec.gt_boxes[i], rec.gt_classes[i], 1.0});
    for (const auto& t : rec.gt_relations) {
        ScoredRelation r;
        r.subj_idx = t.subj_idx;
        r.obj_idx = t.obj_idx;
        r.subj = g.detections[t.subj_idx];
        r.obj = g.detections[t.obj_idx];
        r.pred_id = t.pred_id;
        r.theta_pred = 1.0;
        r.theta_rel = 1.0;
        g.relations.push_back(r);
    }
    g.sort_relations();
    return g;
}

}  // namespace

TEST(Iou, Identities) {
    const BoundingBox b{3, 4, 17, 22};
    EXPECT_DOUBLE_EQ(iou(b, b), 1.0);
    EXPECT_DOUBLE_EQ(iou({0, 0, 10, 10}, {20, 20, 30, 30}), 0.0);
    EXPECT_NEAR(iou({0, 0, 10, 10}, {5, 0, 15, 10}), 1.0 / 3.0, 1e-15);
}

TEST(Iou, AgreesWithPixelCountingOracle) {
    EXPECT_DOUBLE_EQ(oracle::pixel_iou({0, 0, 10, 10}, {5, 0, 15, 10}, 1), 50.0 / 150.0);
    EXPECT_DOUBLE_EQ(oracle::pixel_iou({2, 2, 8, 8}, {2, 2, 8, 8}, 1), 1.0);
    EXPECT_DOUBLE_EQ(oracle::pixel_iou({0, 0, 4, 4}, {6, 6, 9, 9}, 1), 0.0);
    // convergence on non-integer boxes
    const BoundingBox a{0.5, 0.25, 10.75, 9.5}, b{4.25, 0.25, 14.5, 9.5};
    EXPECT_NEAR(oracle::pixel_iou(a, b, 8), iou(a, b), 2e-2);
}

TEST(MatchTriplets, PerfectPredictionsMatchAllGt) {
    Rng rng(1);
    const Fixture fx = random_fixture(rng, "x");
    const SceneGraph g = perfect_graph(fx.record);
    const auto matched =
        match_triplets(g.relations, fx.record, 0.5, static_cast<int>(fx.record.gt_relations.size()));
    EXPECT_EQ(matched.size(), fx.record.gt_relations.size());
}

TEST(MatchTriplets, WrongPredicateNeverMatches) {
    ImageRecord rec;
    rec.image_id = "wp";
    rec.width = rec.height = 100;
    rec.gt_boxes = {{0, 0, 20, 20}, {40, 40, 60, 60}};
    rec.gt_classes = {0, 1};
    rec.gt_relations = {{0, 2, 1}};
    SceneGraph g = perfect_graph(rec);
    ASSERT_EQ(match_triplets(g.relations, rec, 0.5, 100).size(), 1u);
    g.relations[0].pred_id = 3;  // correct boxes and classes, wrong predicate
    EXPECT_TRUE(match_triplets(g.relations, rec, 0.5, 100).empty());
}

TEST(MatchTriplets, AgreesWithBruteForceOnPartialOverlaps) {
    Rng rng(3);
    for (int t = 0; t < 50; ++t) {
        const Fixture fx = random_fixture(rng, "f" + std::to_string(t));
        for (const int K : {1, 3, 6, 10, 20}) {
            const auto matched = match_triplets(fx.graph.relations, fx.record, 0.5, K);
            EXPECT_EQ(static_cast<int>(matched.size()),
                      oracle::brute_match_count(fx.graph.relations, fx.record, 0.5, K));
        }
    }
}

TEST(Recall, PerfectPredictionsGiveOne) {
    Rng rng(4);
    std::vector<ImageRecord> records;
    std::vector<SceneGraph> graphs;
    for (int i = 0; i < 5; ++i) {
        const Fixture fx = random_fixture(rng, "r" + std::to_string(i));
        records.push_back(fx.record);
        graphs.push_back(perfect_graph(fx.record));
    }
    EXPECT_DOUBLE_EQ(recall_at_k(graphs, records, 100), 1.0);
    EXPECT_DOUBLE_EQ(mean_recall_at_k(graphs, records, 100, 6), 1.0);
}

TEST(Recall, EmptyPredictionsGiveZero) {
    Rng rng(5);
    const Fixture fx = random_fixture(rng, "r");
    SceneGraph empty;
    empty.image_id = fx.record.image_id;
    EXPECT_DOUBLE_EQ(recall_at_k({empty}, {fx.record}, 20), 0.0);
}

TEST(Recall, AllImagesSkippedIsAnError) {
    ImageRecord rec;
    rec.image_id = "nogt";
    rec.width = 10;
    rec.height = 10;
    SceneGraph g;
    EXPECT_THROW(recall_at_k({g}, {rec}, 20), DataError);
    EXPECT_THROW(mean_recall_at_k({g}, {rec}, 20, 6), DataError);
}

TEST(MeanRecall, SinglePredictedClassOnBalancedGt) {
    // two images, one GT relation of class 0 and one of class 1 each; the
    // predictor only ever emits class 0
    std::vector<ImageRecord> records;
    std::vector<SceneGraph> graphs;
    for (int i = 0; i < 2; ++i) {
        ImageRecord rec;
        rec.image_id = "b" + std::to_string(i);
        rec.width = rec.height = 100;
        rec.gt_boxes = {{0, 0, 20, 20}, {40, 40, 60, 60}};
        rec.gt_classes = {0, 1};
        rec.gt_relations = {{0, 0, 1}, {1, 1, 0}};
        records.push_back(rec);

        SceneGraph g = perfect_graph(rec);
        g.relations.erase(
            std::remove_if(g.relations.begin(), g.relations.end(),
                           [](const ScoredRelation& r) { return r.pred_id != 0; }),
            g.relations.end());
        graphs.push_back(g);
    }
    EXPECT_DOUBLE_EQ(mean_recall_at_k(graphs, records, 20, 2), 0.5);
    EXPECT_DOUBLE_EQ(recall_at_k(graphs, records, 20), 0.5);
}

TEST(F1, HarmonicMeanIdentities) {
    EXPECT_DOUBLE_EQ(f1_at_k(0.4, 0.4), 0.4);
    EXPECT_DOUBLE_EQ(f1_at_k(0.2, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(f1_at_k(0.0, 0.0), 0.0);
    // REACT row: mR 18.0, R 30.9 -> F1 22.8 (reported rounded)
    EXPECT_NEAR(f1_at_k(0.180, 0.309), 0.2275, 0.0005);
}

TEST(Map50, PerfectDetectionsGiveOne) {
    Rng rng(6);
    std::vector<ImageRecord> records;
    std::vector<std::vector<Detection>> dets;
    for (int i = 0; i < 4; ++i) {
        const Fixture fx = random_fixture(rng, "m" + std::to_string(i));
        records.push_back(fx.record);
        std::vector<Detection> d;
        for (std::size_t g = 0; g < fx.record.gt_boxes.size(); ++g)
            d.push_back({fx.record.gt_boxes[g], fx.record.gt_classes[g], 1.0});
        dets.push_back(d);
    }
    EXPECT_DOUBLE_EQ(map50(dets, records, 5), 1.0);
    EXPECT_DOUBLE_EQ(map50(std::vector<std::vector<Detection>>(records.size()), records, 5), 0.0);
}

TEST(Map50, AgreesWithReferenceOnMixedFixture) {
    Rng rng(7);
    for (int t = 0; t < 20; ++t) {
        std::vector<ImageRecord> records;
        std::vector<std::vector<Detection>> dets;
        for (int i = 0; i < 5; ++i) {
            const Fixture fx = random_fixture(rng, "x" + std::to_string(i));
            records.push_back(fx.record);
            dets.push_back(fx.graph.detections);
        }
        EXPECT_NEAR(map50(dets, records, 5), oracle::reference_map50(dets, records, 5), 1e-12);
    }
}

TEST(Map50, InvariantUnderMonotoneScoreTransforms) {
    Rng rng(8);
    std::vector<ImageRecord> records;
    std::vector<std::vector<Detection>> dets;
    for (int i = 0; i < 6; ++i) {
        const Fixture fx = random_fixture(rng, "s" + std::to_string(i));
        records.push_back(fx.record);
        dets.push_back(fx.graph.detections);
    }
    const double base = map50(dets, records, 5);
    auto transformed = dets;
    for (auto& img : transformed)
        for (auto& d : img) d.score = std::tanh(3.0 * d.score) + 2.0;  // strictly increasing
    EXPECT_DOUBLE_EQ(map50(transformed, records, 5), base);
}

TEST(OracleEquivalence, HundredRandomFixtures) {
    Rng rng(9);
    for (int t = 0; t < 100; ++t) {
        std::vector<ImageRecord> records;
        std::vector<SceneGraph> graphs;
        std::vector<std::vector<Detection>> dets;
        const int imgs = rng.uniform_int(1, 4);
        for (int i = 0; i < imgs; ++i) {
            const Fixture fx = random_fixture(rng, "e" + std::to_string(i));
            records.push_back(fx.record);
            graphs.push_back(fx.graph);
            dets.push_back(fx.graph.detections);
        }
        for (const int K : {5, 20, 50}) {
            ASSERT_NEAR(recall_at_k(graphs, records, K), oracle::brute_recall(graphs, records, K),
                        1e-12);
            ASSERT_NEAR(mean_recall_at_k(graphs, records, K, 6),
                        oracle::brute_mean_recall(graphs, records, K, 6), 1e-12);
        }
        ASSERT_NEAR(map50(dets, records, 5), oracle::reference_map50(dets, records, 5), 1e-12);
    }
}

TEST(Monotonicity, RecallGrowsWithK) {
    Rng rng(10);
    std::vector<ImageRecord> records;
    std::vector<SceneGraph> graphs;
    for (int i = 0; i < 10; ++i) {
        const Fixture fx = random_fixture(rng, "k" + std::to_string(i));
        records.push_back(fx.record);
        graphs.push_back(fx.graph);
    }
    const double r20 = recall_at_k(graphs, records, 20);
    const double r50 = recall_at_k(graphs, records, 50);
    const double r100 = recall_at_k(graphs, records, 100);
    EXPECT_LE(r20, r50);
    EXPECT_LE(r50, r100);
    const double m20 = mean_recall_at_k(graphs, records, 20, 6);
    const double m50 = mean_recall_at_k(graphs, records, 50, 6);
    const double m100 = mean_recall_at_k(graphs, records, 100, 6);
    EXPECT_LE(m20, m50);
    EXPECT_LE(m50, m100);
}

TEST(MatchTriplets, DeterministicUnderTieBreakOrdering) {
    Rng rng(11);
    const Fixture fx = random_fixture(rng, "ties");
    SceneGraph g = fx.graph;
    for (auto& r : g.relations) r.theta_rel = 0.5;  // all tied
    g.sort_relations();
    const auto first = match_triplets(g.relations, fx.record, 0.5, 10);
    SceneGraph g2 = g;
    std::reverse(g2.relations.begin(), g2.relations.end());
    g2.sort_relations();
    const auto second = match_triplets(g2.relations, fx.record, 0.5, 10);
    EXPECT_EQ(first.size(), second.size());
}

TEST(EvaluateGraphs, ReportIsConsistent) {
    Rng rng(12);
    std::vector<ImageRecord> records;
    std::vector<SceneGraph> graphs;
    std::vector<std::vector<Detection>> dets;
    for (int i = 0; i < 8; ++i) {
        const Fixture fx = random_fixture(rng, "c" + std::to_string(i));
        records.push_back(fx.record);
        graphs.push_back(fx.graph);
        dets.push_back(fx.graph.detections);
    }
    const MetricReport rep = evaluate_graphs(graphs, records, dets, {20, 50, 100}, 5, 6);
    for (const int K : {20, 50, 100}) {
        EXPECT_NEAR(rep.f1.at(K), f1_at_k(rep.recall.at(K), rep.mean_recall.at(K)), 1e-15);
        EXPECT_LE(std::min(rep.recall.at(K), rep.mean_recall.at(K)), rep.f1.at(K) + 1e-15);
        EXPECT_GE(std::max(rep.recall.at(K), rep.mean_recall.at(K)) + 1e-15, rep.f1.at(K));
    }
    EXPECT_TRUE(rep.freeze_invariant_holds);  // graphs carry the same detections
    EXPECT_EQ(rep.num_images, 8);
    const auto j = rep.to_json();
    EXPECT_EQ(j.at("format"), "sgg-lab/1");
}
