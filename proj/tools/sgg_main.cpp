// sgg: desk-scale scene-graph-generation toolkit.
// Subcommands: synth-gen, train-detector, train-relhead, eval, dcs-fit,
// bench, ablate, plot. See README.md for a full walkthrough.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sgg/bench/latency.hpp"
#include "sgg/cli/config.hpp"
#include "sgg/cli/svg.hpp"
#include "sgg/core/predictions.hpp"
#include "sgg/detector/train.hpp"
#include "sgg/metrics/evaluate.hpp"
#include "sgg/relhead/pipeline.hpp"
#include "sgg/relhead/train.hpp"
#include "sgg/synth/synth.hpp"

namespace fs = std::filesystem;
using namespace sgg;
using cli::RunConfig;

namespace {

constexpr const char* kVersion = "0.1.0";

struct CommonArgs {
    std::string config_file;
    std::vector<std::string> overrides;
    std::string dataset;
    std::string out_dir;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_file, "config file (key = value lines)");
    cmd->add_option("--set", args.overrides, "override a config key, e.g. --set train.lr=0.01");
    cmd->add_option("--dataset", args.dataset, "dataset directory (shortcut for dataset.dir)");
    cmd->add_option("-o,--out", args.out_dir, "output directory (shortcut for run.out_dir)");
}

RunConfig resolve_config(const CommonArgs& args) {
    RunConfig cfg;
    if (!args.config_file.empty()) cfg.load_file(args.config_file);
    for (const auto& kv : args.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got: " + kv);
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!args.dataset.empty()) cfg.set("dataset.dir", args.dataset);
    if (!args.out_dir.empty()) cfg.set("run.out_dir", args.out_dir);
    return cfg;
}

fs::path ensure_out_dir(const RunConfig& cfg) {
    const fs::path out = cfg.str("run.out_dir");
    fs::create_directories(out);
    return out;
}

void write_json(const nlohmann::json& j, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

void write_manifest(const RunConfig& cfg, const fs::path& out, const std::string& command,
                    nlohmann::json extra = nlohmann::json::object()) {
    nlohmann::json j = {{"format", kFormatTag}, {"kind", "run_manifest"},
                        {"command", command},  {"version", kVersion},
                        {"config", cfg.to_json()}, {"config_hash", cfg.hash()}};
    j.update(extra);
    write_json(j, out / "run_manifest.json");
}

AnnotationDataset load_dataset(const RunConfig& cfg) {
    const std::string dir = cfg.str("dataset.dir");
    if (dir.empty()) throw ConfigError("dataset.dir is required for this command");
    return synth::load_dataset_dir(dir);
}

rel::RelHeadConfig relhead_config(const RunConfig& cfg, const DatasetVocab& vocab) {
    rel::RelHeadConfig rcfg;
    rcfg.num_predicates = vocab.num_predicates();
    rcfg.d_vis = cfg.integer("model.d_vis");
    rcfg.d_txt = cfg.integer("model.d_txt");
    rcfg.d_node = cfg.integer("model.d_node");
    rcfg.d_edge = cfg.integer("model.d_edge");
    rcfg.legacy_fusion = cfg.boolean("relhead.legacy_fusion");
    rcfg.extended_spatial = cfg.boolean("relhead.extended_spatial");
    rcfg.graph_constraint = cfg.boolean("relhead.graph_constraint");
    rcfg.flags.use_text = cfg.boolean("ablation.text");
    rcfg.flags.use_visual = cfg.boolean("ablation.visual");
    rcfg.flags.use_spatial = cfg.boolean("ablation.spatial");
    rcfg.flags.use_union = cfg.boolean("ablation.union");
    rcfg.init_seed = cfg.seed() + 2;
    return rcfg;
}

det::DetectorModel build_detector(const RunConfig& cfg, const DatasetVocab& vocab) {
    det::DetectorConfig dcfg;
    dcfg.num_classes = vocab.num_classes();
    dcfg.pyramid_channels = cfg.integer("model.pyramid_channels");
    dcfg.d_vis = cfg.integer("model.d_vis");
    dcfg.pool_size = cfg.integer("model.pool_size");
    dcfg.canonical_box = cfg.number("detector.canonical_box");
    dcfg.nms_iou = cfg.number("detector.nms_iou");
    dcfg.score_thresh = cfg.number("detector.score_thresh");
    dcfg.noise_sigma_px = cfg.number("detector.sigma_px");
    dcfg.init_seed = cfg.seed() + 1;
    dcfg.noise_seed = cfg.seed() + 7;
    const std::string ckpt = cfg.str("detector.checkpoint");
    if (!ckpt.empty()) return det::DetectorModel::from_checkpoint(load_checkpoint(ckpt), dcfg);
    return det::DetectorModel::init(dcfg);
}

rel::RelHead build_relhead(const RunConfig& cfg, const DatasetVocab& vocab) {
    const rel::RelHeadConfig rcfg = relhead_config(cfg, vocab);
    const std::string ckpt = cfg.str("relhead.checkpoint");
    if (!ckpt.empty())
        return rel::RelHead::from_checkpoint(load_checkpoint(ckpt), rcfg, vocab.categories);
    return rel::RelHead::init(rcfg, vocab.categories);
}

det::DetectorMode detector_mode(const RunConfig& cfg) {
    return det::detector_mode_from_string(cfg.str("detector.mode"));
}

void print_report(const metrics::MetricReport& rep, const DatasetVocab& vocab) {
    auto pct = [](double v) { return 100.0 * v; };
    std::printf("\n  K     mR@K     R@K     F1@K\n");
    for (const auto& [K, r] : rep.recall)
        std::printf("%4d   %6.2f  %6.2f   %6.2f\n", K, pct(rep.mean_recall.at(K)), pct(r),
                    pct(rep.f1.at(K)));
    std::printf("F1 avg %.2f | mAP50 %.2f | detector-only mAP50 %.2f | freeze %s\n",
                pct(rep.f1_average), pct(rep.map50_pipeline), pct(rep.map50_detector_only),
                rep.freeze_invariant_holds ? "holds" : "VIOLATED");
    std::printf("images %d | gt triplets %d | k_budget %d | %s\n", rep.num_images,
                rep.num_gt_triplets, rep.k_budget,
                rep.graph_constraint ? "graph-constrained" : "no-graph-constraint");
    std::printf("per-predicate recall:");
    for (std::size_t p = 0; p < rep.per_predicate.size(); ++p) {
        if (rep.per_predicate[p] < 0) continue;
        std::printf(" %s=%.2f", vocab.predicates[p].c_str(), pct(rep.per_predicate[p]));
    }
    std::printf("\n");
}

nlohmann::json log_to_jsonl_file(const std::vector<double>& losses, double lr,
                                 const fs::path& path) {
    std::ofstream out(path);
    for (std::size_t e = 0; e < losses.size(); ++e)
        out << nlohmann::json{{"epoch", e}, {"loss", losses[e]}, {"lr", lr}}.dump() << "\n";
    return {{"epochs", losses.size()}, {"final_loss", losses.empty() ? 0.0 : losses.back()}};
}

// --- commands ----------------------------------------------------------------

int cmd_synth_gen(const RunConfig& cfg) {
    synth::SynthConfig scfg;
    scfg.num_images = cfg.integer("synth.num_images");
    scfg.num_classes = cfg.integer("synth.num_classes");
    scfg.min_objects = cfg.integer("synth.min_objects");
    scfg.max_objects = cfg.integer("synth.max_objects");
    scfg.image_width = scfg.image_height = cfg.integer("synth.image_size");
    scfg.min_box = cfg.number("synth.min_box");
    scfg.max_box = cfg.number("synth.max_box");
    scfg.structured_prob = cfg.number("synth.structured_prob");
    scfg.clean_margins = cfg.boolean("synth.clean_margins");
    scfg.seed = cfg.seed();

    const fs::path out = ensure_out_dir(cfg);
    const auto records = synth::generate_dataset(scfg);
    synth::write_dataset(records, scfg, out);
    write_manifest(cfg, out, "synth-gen");

    std::size_t triplets = 0;
    for (const auto& r : records) triplets += r.gt_relations.size();
    std::printf("wrote %zu images, %zu triplets to %s\n", records.size(), triplets,
                out.string().c_str());
    return 0;
}

int cmd_train_detector(const RunConfig& cfg) {
    const auto ds = load_dataset(cfg);
    const fs::path out = ensure_out_dir(cfg);
    det::DetectorModel model = build_detector(cfg, ds.vocab);
    const double lr = cfg.number("train.lr");
    const auto log = det::train_detector(model, ds.records, cfg.integer("train.epochs"), lr,
                                         cfg.integer("train.batch"), cfg.seed() + 11);
    save_checkpoint(model.to_checkpoint(), out / "detector.ckpt");
    const auto summary = log_to_jsonl_file(log.epoch_losses, lr, out / "train_log_detector.jsonl");
    write_manifest(cfg, out, "train-detector", {{"training", summary}});
    std::printf("trained detector: %zu params, final loss %.4f -> %s\n",
                bench::count_params(model).total, log.epoch_losses.back(),
                (out / "detector.ckpt").string().c_str());
    return 0;
}

int cmd_train_relhead(const RunConfig& cfg) {
    const auto ds = load_dataset(cfg);
    const fs::path out = ensure_out_dir(cfg);
    const det::DetectorModel detector = build_detector(cfg, ds.vocab);
    rel::RelHead head = rel::RelHead::init(relhead_config(cfg, ds.vocab), ds.vocab.categories);

    const int theta = cfg.integer("train.theta");
    const auto cache = rel::precompute_cache(detector, detector_mode(cfg), ds.records, theta,
                                             head.cfg.flags.use_union);
    const double lr = cfg.number("train.lr");
    const auto log = rel::train_relhead(head, ds.records, cache, cfg.integer("train.epochs"), lr,
                                        cfg.integer("train.batch"), cfg.seed() + 13);
    save_checkpoint(head.to_checkpoint(), out / "relhead.ckpt");
    const auto summary = log_to_jsonl_file(log.epoch_losses, lr, out / "train_log_relhead.jsonl");
    write_manifest(cfg, out, "train-relhead", {{"training", summary}});
    std::printf("trained relation head: %zu params, final loss %.4f -> %s\n",
                bench::count_params(head).total, log.epoch_losses.back(),
                (out / "relhead.ckpt").string().c_str());
    return 0;
}

int resolve_k_budget(const RunConfig& cfg, const fs::path& out, nlohmann::json* note) {
    const std::string raw = cfg.str("eval.k_budget");
    if (raw != "dcs") {
        try {
            return std::stoi(raw);
        } catch (const std::exception&) {
            throw ConfigError("eval.k_budget: expected integer or 'dcs', got '" + raw + "'");
        }
    }
    const fs::path curve_path = out / "dcs_curve.json";
    std::ifstream in(curve_path);
    if (!in)
        throw MissingArtifactError("eval.k_budget=dcs needs " + curve_path.string() +
                                   "; run dcs-fit first");
    nlohmann::json j;
    in >> j;
    const auto curve = sel::DcsCurve::from_json(j);
    if (curve.x_opt < 1) throw MissingArtifactError("dcs_curve.json has no fitted x_opt");
    if (note) (*note)["x_opt_used"] = curve.x_opt;
    return curve.x_opt;
}

int cmd_eval(const RunConfig& cfg) {
    const auto ds = load_dataset(cfg);
    const fs::path out = ensure_out_dir(cfg);
    const det::DetectorModel detector = build_detector(cfg, ds.vocab);
    const rel::RelHead head = build_relhead(cfg, ds.vocab);
    rel::PipelineConfig pcfg;
    pcfg.mode = detector_mode(cfg);
    pcfg.nms_iou = cfg.number("detector.nms_iou");
    const rel::Pipeline pipeline(detector, head, pcfg);

    nlohmann::json note = nlohmann::json::object();
    const int k_budget = resolve_k_budget(cfg, out, &note);
    const auto rep = metrics::evaluate_dataset(pipeline, ds.records, cfg.int_list("eval.ks"),
                                               k_budget, ds.vocab.num_classes(),
                                               ds.vocab.num_predicates());
    write_json(rep.to_json(), out / "metrics.json");
    write_manifest(cfg, out, "eval", note);
    print_report(rep, ds.vocab);
    return 0;
}

int cmd_dcs_fit(const RunConfig& cfg) {
    const auto ds = load_dataset(cfg);
    const fs::path out = ensure_out_dir(cfg);
    const det::DetectorModel detector = build_detector(cfg, ds.vocab);
    const rel::RelHead head = build_relhead(cfg, ds.vocab);

    const int theta = cfg.integer("dcs.theta");
    const auto cache = rel::precompute_cache(detector, detector_mode(cfg), ds.records, theta,
                                             head.cfg.flags.use_union);
    const auto Ks = cfg.int_list("eval.ks");

    const auto evaluator = [&](int k) {
        std::vector<SceneGraph> graphs;
        graphs.reserve(ds.records.size());
        for (std::size_t i = 0; i < ds.records.size(); ++i)
            graphs.push_back(rel::cached_forward(head, cache[i], ds.records[i], k));
        double f1_sum = 0.0;
        for (const int K : Ks)
            f1_sum += metrics::f1_at_k(
                metrics::recall_at_k(graphs, ds.records, K),
                metrics::mean_recall_at_k(graphs, ds.records, K, ds.vocab.num_predicates()));
        return f1_sum / Ks.size();
    };

    auto curve = sel::sample_curve(evaluator,
                                   sel::default_grid(theta, cfg.integer("dcs.grid_step")),
                                   cfg.number("dcs.epsilon"), theta);
    sel::dcs_fit(curve, cfg.integer("dcs.smooth_window"));

    write_json(curve.to_json(), out / "dcs_curve.json");
    cli::Series series;
    series.label = "avg F1@K";
    for (std::size_t i = 0; i < curve.sampled_k.size(); ++i) {
        series.x.push_back(curve.sampled_k[i]);
        series.y.push_back(curve.metric_values[i]);
    }
    cli::write_line_plot(out / "dcs_curve.svg", "Average F1@K vs proposal budget", "k",
                         "avg F1@K", {series}, curve.x_opt);
    write_manifest(cfg, out, "dcs-fit", {{"x_opt", curve.x_opt}});
    std::printf("dcs-fit: x_opt = %d (epsilon %.2g, theta %d) -> %s\n", curve.x_opt,
                curve.epsilon, curve.theta, (out / "dcs_curve.json").string().c_str());
    return 0;
}

int cmd_bench(const RunConfig& cfg) {
    auto ds = load_dataset(cfg);
    const fs::path out = ensure_out_dir(cfg);
    const int max_images = cfg.integer("bench.max_images");
    if (static_cast<int>(ds.records.size()) > max_images) ds.records.resize(max_images);

    const det::DetectorModel detector = build_detector(cfg, ds.vocab);
    const rel::RelHead head = build_relhead(cfg, ds.vocab);
    rel::PipelineConfig pcfg;
    pcfg.mode = detector_mode(cfg);
    const rel::Pipeline pipeline(detector, head, pcfg);

    nlohmann::json points = nlohmann::json::array();
    cli::Series mean_series{"end-to-end", "#2060c0", {}, {}};
    cli::Series rel_series{"relation stage", "#c07020", {}, {}};
    std::printf("   k   mean_ms    p50_ms    p95_ms  relhead_ms\n");
    for (const int k : cfg.int_list("bench.budgets")) {
        const auto stats = bench::measure_latency(pipeline, ds.records, k,
                                                  cfg.integer("bench.warmup"),
                                                  cfg.integer("bench.reps"));
        nlohmann::json p = stats.to_json();
        p["k"] = k;
        points.push_back(p);
        mean_series.x.push_back(k);
        mean_series.y.push_back(stats.mean_ms);
        rel_series.x.push_back(k);
        rel_series.y.push_back(stats.relhead_ms);
        std::printf("%4d  %8.2f  %8.2f  %8.2f    %8.2f\n", k, stats.mean_ms, stats.p50_ms,
                    stats.p95_ms, stats.relhead_ms);
    }
    write_json({{"format", kFormatTag}, {"kind", "latency_sweep"}, {"points", points}},
               out / "latency.json");
    cli::write_line_plot(out / "latency.svg", "Latency vs proposal budget (batch size 1)", "k",
                         "ms", {mean_series, rel_series});
    write_manifest(cfg, out, "bench");
    return 0;
}

int cmd_ablate(const RunConfig& cfg) {
    const auto ds = load_dataset(cfg);
    const fs::path out = ensure_out_dir(cfg);
    const det::DetectorModel detector = build_detector(cfg, ds.vocab);

    // 75/25 train/eval split
    std::vector<ImageRecord> train_recs, eval_recs;
    for (std::size_t i = 0; i < ds.records.size(); ++i)
        (i % 4 == 3 ? eval_recs : train_recs).push_back(ds.records[i]);
    if (train_recs.empty() || eval_recs.empty())
        throw DataError("ablate: dataset too small to split");

    const int theta = cfg.integer("train.theta");
    const auto mode = detector_mode(cfg);
    const auto train_cache = rel::precompute_cache(detector, mode, train_recs, theta, true);
    const auto eval_cache = rel::precompute_cache(detector, mode, eval_recs, theta, true);

    struct Row {
        bool t, v, s, u;
    };
    const std::vector<Row> rows = {{true, true, true, true},
                                   {true, true, true, false},
                                   {true, true, false, true},
                                   {true, true, false, false},
                                   {true, false, false, false}};

    const auto Ks = cfg.int_list("eval.ks");
    nlohmann::json jrows = nlohmann::json::array();
    std::printf(" T V S U   mR@20    R@20   F1avg   edge_dims  params\n");
    for (const auto& row : rows) {
        rel::RelHeadConfig rcfg = relhead_config(cfg, ds.vocab);
        rcfg.flags = {row.t, row.v, row.s, row.u};
        rel::RelHead head = rel::RelHead::init(rcfg, ds.vocab.categories);

        rel::train_relhead(head, train_recs, train_cache, cfg.integer("train.epochs"),
                           cfg.number("train.lr"), cfg.integer("train.batch"), cfg.seed() + 13);

        std::vector<SceneGraph> graphs;
        for (std::size_t i = 0; i < eval_recs.size(); ++i)
            graphs.push_back(rel::cached_forward(head, eval_cache[i], eval_recs[i], theta));
        const double mr20 =
            metrics::mean_recall_at_k(graphs, eval_recs, 20, ds.vocab.num_predicates());
        const double r20 = metrics::recall_at_k(graphs, eval_recs, 20);
        double f1_sum = 0.0;
        for (const int K : Ks)
            f1_sum += metrics::f1_at_k(
                metrics::recall_at_k(graphs, eval_recs, K),
                metrics::mean_recall_at_k(graphs, eval_recs, K, ds.vocab.num_predicates()));
        const double f1avg = f1_sum / Ks.size();
        const auto params = bench::count_params(head).total;

        jrows.push_back({{"text", row.t},
                         {"visual", row.v},
                         {"spatial", row.s},
                         {"union", row.u},
                         {"mR@20", mr20},
                         {"R@20", r20},
                         {"f1_average", f1avg},
                         {"edge_input_dims", head.cfg.edge_input_dim()},
                         {"params", params}});
        std::printf(" %c %c %c %c  %6.2f  %6.2f  %6.2f   %9d  %zu\n", row.t ? 'x' : '-',
                    row.v ? 'x' : '-', row.s ? 'x' : '-', row.u ? 'x' : '-', 100 * mr20,
                    100 * r20, 100 * f1avg, head.cfg.edge_input_dim(), params);
    }
    write_json({{"format", kFormatTag}, {"kind", "ablation_table"}, {"rows", jrows}},
               out / "ablation.json");
    write_manifest(cfg, out, "ablate");
    return 0;
}

int cmd_plot(const std::string& artifact, const std::string& out_image) {
    std::ifstream in(artifact);
    if (!in) throw MissingArtifactError("cannot open artifact: " + artifact);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("artifact parse error: " + std::string(e.what()));
    }
    const std::string kind = j.value("kind", "");
    const fs::path out_path =
        out_image.empty() ? fs::path(artifact).replace_extension(".svg") : fs::path(out_image);

    if (kind == "dcs_curve") {
        const auto curve = sel::DcsCurve::from_json(j);
        cli::Series s{"avg F1@K", "#2060c0", {}, {}};
        for (std::size_t i = 0; i < curve.sampled_k.size(); ++i) {
            s.x.push_back(curve.sampled_k[i]);
            s.y.push_back(curve.metric_values[i]);
        }
        cli::write_line_plot(out_path, "Average F1@K vs proposal budget", "k", "avg F1@K", {s},
                             curve.x_opt);
    } else if (kind == "latency_sweep") {
        cli::Series mean_s{"end-to-end", "#2060c0", {}, {}};
        cli::Series rel_s{"relation stage", "#c07020", {}, {}};
        for (const auto& p : j.at("points")) {
            mean_s.x.push_back(p.at("k").get<double>());
            mean_s.y.push_back(p.at("mean_ms").get<double>());
            rel_s.x.push_back(p.at("k").get<double>());
            rel_s.y.push_back(p.at("stages").at("relhead_ms").get<double>());
        }
        cli::write_line_plot(out_path, "Latency vs proposal budget (batch size 1)", "k", "ms",
                             {mean_s, rel_s});
    } else if (kind == "metric_report") {
        cli::Series r{"R@K", "#2060c0", {}, {}}, mr{"mR@K", "#c07020", {}, {}},
            f1{"F1@K", "#208050", {}, {}};
        for (const auto& [k, v] : j.at("recall").items()) {
            r.x.push_back(std::stod(k));
            r.y.push_back(v.get<double>());
        }
        for (const auto& [k, v] : j.at("mean_recall").items()) {
            mr.x.push_back(std::stod(k));
            mr.y.push_back(v.get<double>());
        }
        for (const auto& [k, v] : j.at("f1").items()) {
            f1.x.push_back(std::stod(k));
            f1.y.push_back(v.get<double>());
        }
        cli::write_line_plot(out_path, "Recall metrics vs K", "K", "value", {r, mr, f1});
    } else {
        throw DataError("plot: unsupported artifact kind '" + kind + "'");
    }
    std::printf("wrote %s\n", out_path.string().c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"desk-scale scene graph generation toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    CommonArgs args;
    std::string plot_artifact, plot_out;

    auto* synth_gen = app.add_subcommand("synth-gen", "generate a synthetic dataset");
    add_common(synth_gen, args);
    auto* train_det = app.add_subcommand("train-detector", "train the tiny detector");
    add_common(train_det, args);
    auto* train_rel = app.add_subcommand("train-relhead", "train the relation head");
    add_common(train_rel, args);
    auto* eval = app.add_subcommand("eval", "evaluate the pipeline and write a metric report");
    add_common(eval, args);
    std::string k_budget_flag;
    eval->add_option("--k-budget", k_budget_flag, "proposal budget (integer or 'dcs')");
    auto* dcs = app.add_subcommand("dcs-fit", "sweep budgets and fit the DCS optimum");
    add_common(dcs, args);
    auto* bench_cmd = app.add_subcommand("bench", "latency benchmark across budgets");
    add_common(bench_cmd, args);
    auto* ablate = app.add_subcommand("ablate", "run the T/V/S/U feature-source grid");
    add_common(ablate, args);
    auto* plot = app.add_subcommand("plot", "render a saved JSON artifact to SVG");
    add_common(plot, args);
    plot->add_option("artifact", plot_artifact, "artifact JSON path")->required();
    plot->add_option("--image", plot_out, "output image path (.svg)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        RunConfig cfg = resolve_config(args);
        if (!k_budget_flag.empty()) cfg.set("eval.k_budget", k_budget_flag);
        if (synth_gen->parsed()) return cmd_synth_gen(cfg);
        if (train_det->parsed()) return cmd_train_detector(cfg);
        if (train_rel->parsed()) return cmd_train_relhead(cfg);
        if (eval->parsed()) return cmd_eval(cfg);
        if (dcs->parsed()) return cmd_dcs_fit(cfg);
        if (bench_cmd->parsed()) return cmd_bench(cfg);
        if (ablate->parsed()) return cmd_ablate(cfg);
        if (plot->parsed()) return cmd_plot(plot_artifact, plot_out);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const MissingArtifactError& e) {
        std::cerr << "missing artifact: " << e.what() << "\n";
        return 4;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
