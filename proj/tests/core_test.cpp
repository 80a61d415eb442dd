#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "sgg/core/annotations.hpp"
#include "sgg/core/image_io.hpp"
#include "sgg/core/predictions.hpp"
#include "sgg/core/rng.hpp"
#include "sgg/core/types.hpp"
#include "sgg/core/validate.hpp"

namespace fs = std::filesystem;
using namespace sgg;

namespace {

fs::path temp_dir() {
    const fs::path dir = fs::temp_directory_path() / "sgg_core_test";
    fs::create_directories(dir);
    return dir;
}

ImageRecord minimal_record() {
    ImageRecord rec;
    rec.image_id = "img0";
    rec.width = 100;
    rec.height = 80;
    rec.gt_boxes = {{10, 10, 30, 30}, {40, 40, 70, 60}};
    rec.gt_classes = {0, 1};
    rec.gt_relations = {{0, 2, 1}};
    return rec;
}

SceneGraph random_graph(Rng& rng, const std::string& id) {
    SceneGraph g;
    g.image_id = id;
    const int n = rng.uniform_int(1, 5);
    for (int i = 0; i < n; ++i) {
        const double x = rng.uniform(0, 80), y = rng.uniform(0, 80);
        g.detections.push_back(
            {{x, y, x + rng.uniform(2, 20), y + rng.uniform(2, 20)}, rng.uniform_int(0, 11),
             rng.uniform()});
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j || rng.uniform() < 0.5) continue;
            ScoredRelation r;
            r.subj = g.detections[i];
            r.obj = g.detections[j];
            r.subj_idx = i;
            r.obj_idx = j;
            r.pred_id = rng.uniform_int(0, 5);
            r.theta_pred = rng.uniform();
            r.theta_rel = r.subj.score * r.theta_pred * r.obj.score;
            g.relations.push_back(r);
        }
    g.sort_relations();
    return g;
}

}  // namespace

TEST(Validate, WellFormedRecordHasNoViolations) {
    EXPECT_TRUE(validate_record(minimal_record(), 12, 6).empty());
}

TEST(Validate, DegenerateBoxNamesTheBoxIndex) {
    ImageRecord rec = minimal_record();
    rec.gt_boxes[1] = {40, 40, 40, 60};  // x1 == x2
    const auto v = validate_record(rec, 12, 6);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_NE(v[0].find("box 1"), std::string::npos);
}

TEST(Validate, CountsIndependentViolations) {
    ImageRecord rec = minimal_record();
    rec.gt_boxes[0] = {10, 10, 5, 30};             // inverted x
    rec.gt_classes[1] = 99;                        // class range
    rec.gt_relations.push_back({1, 0, 1});         // self-relation
    EXPECT_EQ(validate_record(rec, 12, 6).size(), 3u);
}

TEST(Validate, TotalOnArbitraryValues) {
    ImageRecord rec = minimal_record();
    rec.gt_boxes[0].x1 = std::numeric_limits<double>::quiet_NaN();
    rec.gt_relations.push_back({-5, 100, 42});
    EXPECT_NO_THROW(validate_record(rec));
    EXPECT_FALSE(validate_record(rec).empty());
}

TEST(Annotations, MinimalFileRoundTrip) {
    AnnotationDataset ds;
    ds.vocab.categories = {"a", "b"};
    ds.vocab.predicates = {"p0", "p1", "p2"};
    ds.records = {minimal_record()};
    const fs::path path = temp_dir() / "minimal.json";
    save_annotations(ds, path);

    const auto loaded = load_annotations(path);
    ASSERT_EQ(loaded.size(), 1u);
    EXPECT_EQ(loaded[0], ds.records[0]);
    EXPECT_EQ(loaded[0].gt_relations.size(), 1u);
}

TEST(Annotations, SelfRelationRejected) {
    AnnotationDataset ds;
    ds.vocab.categories = {"a", "b"};
    ds.vocab.predicates = {"p"};
    ImageRecord rec = minimal_record();
    rec.gt_relations = {{1, 0, 1}};
    ds.records = {rec};
    const fs::path path = temp_dir() / "selfrel.json";
    save_annotations(ds, path);
    EXPECT_THROW(load_annotations(path), DataError);
}

TEST(Annotations, MissingFieldNamesImage) {
    const fs::path path = temp_dir() / "broken.json";
    std::ofstream out(path);
    out << R"({"format":"sgg-lab/1","categories":["a"],"predicates":["p"],)"
        << R"("images":[{"image_id":"imgX","width":10,"height":10,"boxes":[]}]})";
    out.close();
    try {
        load_annotations(path);
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("imgX"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("classes"), std::string::npos);
    }
}

TEST(Annotations, RecordsSortedByImageId) {
    AnnotationDataset ds;
    ds.vocab.categories = {"a", "b"};
    ds.vocab.predicates = {"p", "q", "r"};
    ImageRecord r1 = minimal_record();
    r1.image_id = "zzz";
    ImageRecord r2 = minimal_record();
    r2.image_id = "aaa";
    ds.records = {r1, r2};
    const fs::path path = temp_dir() / "order.json";
    save_annotations(ds, path);
    const auto loaded = load_annotations(path);
    EXPECT_EQ(loaded[0].image_id, "aaa");
    EXPECT_EQ(loaded[1].image_id, "zzz");
}

TEST(Predictions, EmptyListRoundTrips) {
    const fs::path path = temp_dir() / "empty.jsonl";
    save_predictions({}, path);
    EXPECT_TRUE(load_predictions(path).empty());
}

TEST(Predictions, SmallGraphRoundTripsWithOrdering) {
    Rng rng(3);
    std::vector<SceneGraph> graphs = {random_graph(rng, "g0")};
    const fs::path path = temp_dir() / "one.jsonl";
    save_predictions(graphs, path);
    const auto loaded = load_predictions(path);
    ASSERT_EQ(loaded.size(), 1u);
    EXPECT_EQ(loaded[0], graphs[0]);
}

TEST(Predictions, HundredRandomGraphsRoundTripExactly) {
    Rng rng(17);
    std::vector<SceneGraph> graphs;
    for (int i = 0; i < 100; ++i) graphs.push_back(random_graph(rng, "g" + std::to_string(i)));
    const fs::path path = temp_dir() / "many.jsonl";
    save_predictions(graphs, path);
    EXPECT_EQ(load_predictions(path), graphs);
}

TEST(Predictions, MalformedLineReported) {
    const fs::path path = temp_dir() / "bad.jsonl";
    std::ofstream out(path);
    out << "{not json}\n";
    out.close();
    EXPECT_THROW(load_predictions(path), DataError);
}

TEST(SceneGraph, OrderingIsTotalAndIdempotent) {
    Rng rng(5);
    SceneGraph g = random_graph(rng, "g");
    // force theta_rel ties
    for (auto& r : g.relations) r.theta_rel = 0.5;
    g.sort_relations();
    const auto once = g.relations;
    g.sort_relations();
    EXPECT_EQ(g.relations, once);
    for (std::size_t i = 1; i < once.size(); ++i) {
        EXPECT_FALSE(relation_order(once[i], once[i - 1]));
    }
}

TEST(PpmIo, ByteExactRoundTrip) {
    Image img = Image::filled(7, 5, 3, 0.0);
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 7; ++x)
            for (int c = 0; c < 3; ++c) img.at(y, x, c) = ((y * 7 + x + c) % 256) / 255.0;
    const fs::path path = temp_dir() / "img.ppm";
    write_ppm(img, path);
    EXPECT_EQ(read_ppm(path), img);
}

TEST(RngDeterminism, SameSeedSameStream) {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.uniform(), b.uniform());
    Rng c(42), d(43);
    bool differ = false;
    for (int i = 0; i < 10; ++i) differ |= c.uniform() != d.uniform();
    EXPECT_TRUE(differ);
}

TEST(RngDistributions, BetaInUnitIntervalWithPlausibleMean) {
    Rng rng(7);
    double sum = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double v = rng.beta(8, 2);
        ASSERT_GE(v, 0.0);
        ASSERT_LE(v, 1.0);
        sum += v;
    }
    EXPECT_NEAR(sum / n, 0.8, 0.01);  // Beta(8,2) mean
}
