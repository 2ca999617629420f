// bbsig: billboard significance toolkit.
//
// Per-stage subcommands (track, eval-hota, gaze, features, train, classify,
// importance, saliency-metrics, synth) plus an end-to-end `pipeline` run.
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bbsig/features.hpp"
#include "bbsig/forest.hpp"
#include "bbsig/gaze.hpp"
#include "bbsig/hota.hpp"
#include "bbsig/io.hpp"
#include "bbsig/pipeline.hpp"
#include "bbsig/report.hpp"
#include "bbsig/saliency.hpp"
#include "bbsig/synth.hpp"
#include "bbsig/tracker.hpp"

namespace fs = std::filesystem;
using namespace bbsig;

namespace {

constexpr const char* kVersion = "1.0.0";

std::ofstream must_open_out(const fs::path& p) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    return out;
}

ReportFormat parse_format(const std::string& s) {
    return s == "json" ? ReportFormat::Json : ReportFormat::Csv;
}

TrackerVariant parse_variant(const std::string& s) {
    return s == "two-stage" ? TrackerVariant::TwoStage : TrackerVariant::Baseline;
}

struct CommonReport {
    std::string format = "csv";
    ReportHeader header;
};

int run(int argc, char** argv) {
    CLI::App app{"billboard significance toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    // --- track ---------------------------------------------------------
    auto* track = app.add_subcommand("track", "link per-frame detections into tracks");
    std::string t_dets, t_meta, t_out, t_variant = "baseline";
    int t_min_hits = 3, t_max_age = 30;
    double t_iou = 0.3;
    track->add_option("--detections", t_dets, "detection CSV")->required();
    track->add_option("--meta", t_meta, "sequence metadata")->required();
    track->add_option("--out", t_out, "output track CSV")->required();
    track->add_option("--tracker", t_variant)->check(CLI::IsMember({"baseline", "two-stage"}));
    track->add_option("--min-hits", t_min_hits);
    track->add_option("--max-age", t_max_age);
    track->add_option("--iou-threshold", t_iou);

    // --- eval-hota ------------------------------------------------------
    auto* evalh = app.add_subcommand("eval-hota", "HOTA between GT and predicted tracks");
    std::string e_gt, e_pred, e_out, e_format = "csv";
    bool e_per_alpha = false;
    evalh->add_option("--gt", e_gt, "ground-truth track CSV")->required();
    evalh->add_option("--pred", e_pred, "predicted track CSV")->required();
    evalh->add_option("--out", e_out, "report path (stdout when omitted)");
    evalh->add_option("--format", e_format)->check(CLI::IsMember({"csv", "json"}));
    evalh->add_flag("--per-alpha", e_per_alpha, "include the per-alpha breakdown");

    // --- gaze ----------------------------------------------------------
    auto* gaze_cmd = app.add_subcommand("gaze", "dwell times and significance categories");
    std::string g_tracks, g_gaze, g_meta, g_out, g_format = "csv";
    gaze_cmd->add_option("--detections", g_tracks, "track CSV with billboard ids")->required();
    gaze_cmd->add_option("--gaze", g_gaze, "gaze CSV")->required();
    gaze_cmd->add_option("--meta", g_meta, "sequence metadata")->required();
    gaze_cmd->add_option("--out", g_out, "report path (stdout when omitted)");
    gaze_cmd->add_option("--format", g_format)->check(CLI::IsMember({"csv", "json"}));
    double g_fps = 0.0;
    gaze_cmd->add_option("--fps", g_fps, "override metadata fps");

    // --- features ------------------------------------------------------
    auto* feat = app.add_subcommand("features", "gaze-independent billboard features");
    std::string f_tracks, f_sal, f_meta, f_out;
    feat->add_option("--detections", f_tracks, "track CSV with billboard ids")->required();
    feat->add_option("--saliency-dir", f_sal, "directory of frame_NNNNNN.pgm grids");
    feat->add_option("--meta", f_meta, "sequence metadata")->required();
    feat->add_option("--out", f_out, "features CSV")->required();

    // --- train ---------------------------------------------------------
    auto* train = app.add_subcommand("train", "fit the random forest on labeled features");
    std::string tr_features, tr_out;
    int tr_trees = 100, tr_depth = 2;
    std::uint64_t tr_seed = 42;
    bool tr_cv = false;
    train->add_option("--features", tr_features, "labeled features CSV")->required();
    train->add_option("--out", tr_out, "model JSON")->required();
    train->add_option("--trees", tr_trees);
    train->add_option("--depth", tr_depth);
    train->add_option("--seed", tr_seed);
    train->add_flag("--cv", tr_cv, "5-fold grid search over trees/depth first");

    // --- classify ------------------------------------------------------
    auto* classify = app.add_subcommand("classify", "predict categories for feature rows");
    std::string c_model, c_features, c_out, c_format = "csv";
    classify->add_option("--model", c_model, "model JSON")->required();
    classify->add_option("--features", c_features, "features CSV")->required();
    classify->add_option("--out", c_out, "predictions path (stdout when omitted)");
    classify->add_option("--format", c_format)->check(CLI::IsMember({"csv", "json"}));

    // --- importance ----------------------------------------------------
    auto* imp = app.add_subcommand("importance", "MDI and permutation feature importance");
    std::string i_model, i_features, i_out, i_format = "csv";
    std::uint64_t i_seed = 99;
    int i_repeats = 20;
    imp->add_option("--model", i_model, "model JSON")->required();
    imp->add_option("--features", i_features, "labeled features CSV")->required();
    imp->add_option("--out", i_out, "report path (stdout when omitted)");
    imp->add_option("--format", i_format)->check(CLI::IsMember({"csv", "json"}));
    imp->add_option("--seed", i_seed);
    imp->add_option("--repeats", i_repeats);

    // --- saliency-metrics ------------------------------------------------
    auto* sal = app.add_subcommand("saliency-metrics", "AUC-Judd, NSS, SIM, CC for a map");
    std::string s_pred, s_gt, s_gaze, s_out, s_format = "csv";
    sal->add_option("--pred", s_pred, "predicted saliency PGM")->required();
    sal->add_option("--gt", s_gt, "ground-truth density PGM (enables SIM/CC)");
    sal->add_option("--gaze", s_gaze, "gaze CSV; all points become fixations (enables AUC/NSS)");
    sal->add_option("--out", s_out, "report path (stdout when omitted)");
    sal->add_option("--format", s_format)->check(CLI::IsMember({"csv", "json"}));

    // --- synth ----------------------------------------------------------
    auto* synth = app.add_subcommand("synth", "generate a seeded synthetic scenario");
    std::string sy_out, sy_config;
    std::uint64_t sy_seed = 1;
    int sy_drivers = 8, sy_billboards = 20, sy_frames = 2000;
    double sy_jitter = 0.0, sy_size_jitter = 0.0, sy_miss = 0.0, sy_fp = 0.0;
    synth->add_option("--out", sy_out, "scenario directory")->required();
    synth->add_option("--config", sy_config, "scenario config JSON (flags override)");
    synth->add_option("--seed", sy_seed);
    synth->add_option("--drivers", sy_drivers);
    synth->add_option("--billboards", sy_billboards);
    synth->add_option("--frames", sy_frames, "frames per driver");
    synth->add_option("--center-jitter", sy_jitter, "detection center noise stddev, px");
    synth->add_option("--size-jitter", sy_size_jitter, "detection size noise stddev, px");
    synth->add_option("--miss-prob", sy_miss, "per-detection miss probability");
    synth->add_option("--fp-rate", sy_fp, "expected false positives per frame");

    // --- pipeline --------------------------------------------------------
    auto* pipe = app.add_subcommand("pipeline", "full run over a scenario directory");
    std::string p_scenario, p_out, p_variant = "baseline", p_format = "csv";
    std::uint64_t p_seed = 42;
    int p_trees = 100, p_depth = 2, p_min_hits = 3, p_test_size = 0;
    pipe->add_option("--scenario", p_scenario, "scenario directory")->required();
    pipe->add_option("--out", p_out, "output directory")->required();
    pipe->add_option("--seed", p_seed);
    pipe->add_option("--tracker", p_variant)->check(CLI::IsMember({"baseline", "two-stage"}));
    pipe->add_option("--min-hits", p_min_hits);
    pipe->add_option("--trees", p_trees);
    pipe->add_option("--depth", p_depth);
    pipe->add_option("--test-size", p_test_size, "billboards held out (0: ~20%)");
    pipe->add_option("--format", p_format)->check(CLI::IsMember({"csv", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    auto write_or_print = [](const std::string& path, auto&& writer) {
        if (path.empty()) {
            writer(std::cout);
        } else {
            auto out = must_open_out(path);
            writer(out);
        }
    };

    if (*track) {
        TrackerConfig cfg;
        cfg.variant = parse_variant(t_variant);
        cfg.min_hits = t_min_hits;
        cfg.max_age = t_max_age;
        cfg.iou_threshold = t_iou;
        const auto meta = load_meta(t_meta);
        const auto tracks = track_sequence(load_detections(t_dets), cfg, meta);
        auto out = must_open_out(t_out);
        write_detections(out, tracks);
        return 0;
    }

    if (*evalh) {
        const HotaResult r = evaluate_hota(load_detections(e_gt), load_detections(e_pred));
        ReportHeader header;
        header.version = kVersion;
        header.config = {{"gt", e_gt}, {"pred", e_pred}};
        write_or_print(e_out, [&](std::ostream& out) {
            write_hota_report(out, {{"tracker", r}}, parse_format(e_format), e_per_alpha, header);
        });
        return 0;
    }

    if (*gaze_cmd) {
        auto meta = load_meta(g_meta);
        if (g_fps > 0) meta.fps = g_fps;
        const DetectionMap tracks = load_detections(g_tracks);
        const GazeMap gz = load_gaze(g_gaze);
        std::map<int, std::vector<std::pair<int, BoundingBox>>> by_id;
        for (const auto& [frame, dets] : tracks)
            for (const auto& d : dets) by_id[d.id].emplace_back(frame, d.box);
        std::vector<DwellRecord> records;
        for (const auto& [id, frames] : by_id) {
            DwellRecord r = gaze_duration(frames, gz, meta.fps, meta.dims);
            r.billboard_id = id;
            r.driver_id = meta.driver_id;
            records.push_back(r);
        }
        ReportHeader header;
        header.version = kVersion;
        header.config = {{"detections", g_tracks}, {"gaze", g_gaze},
                         {"fps", format_double(meta.fps)}};
        write_or_print(g_out, [&](std::ostream& out) {
            write_dwell_report(out, records, parse_format(g_format), header);
        });
        return 0;
    }

    if (*feat) {
        const auto meta = load_meta(f_meta);
        const DetectionMap tracks = load_detections(f_tracks);
        std::map<int, std::vector<std::pair<int, BoundingBox>>> by_id;
        for (const auto& [frame, dets] : tracks)
            for (const auto& d : dets) by_id[d.id].emplace_back(frame, d.box);
        std::map<int, SaliencyGrid> cache;
        SaliencyLookup lookup = [&](int frame) -> const SaliencyGrid* {
            if (f_sal.empty()) return nullptr;
            auto it = cache.find(frame);
            if (it == cache.end()) {
                const fs::path p = fs::path(f_sal) / saliency_frame_name(frame);
                if (!fs::exists(p)) return nullptr;
                it = cache.emplace(frame, load_saliency_grid(p)).first;
            }
            return &it->second;
        };
        std::vector<FeatureRow> rows;
        for (const auto& [id, frames] : by_id) {
            FeatureRow row;
            row.billboard_id = id;
            row.features = extract_session_features(SessionTrack{frames}, lookup, meta);
            rows.push_back(std::move(row));
        }
        auto out = must_open_out(f_out);
        write_features_csv(out, rows);
        return 0;
    }

    auto load_labeled = [](const std::string& path, std::vector<std::vector<double>>& X,
                           std::vector<int>& y, std::vector<FeatureRow>& rows) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot read " + path);
        rows = parse_features_csv(in);
        for (const auto& r : rows) {
            X.push_back(r.features.as_row());
            if (!r.label.empty()) y.push_back(int(*category_from_string(r.label)));
        }
    };

    if (*train) {
        std::vector<std::vector<double>> X;
        std::vector<int> y;
        std::vector<FeatureRow> rows;
        load_labeled(tr_features, X, y, rows);
        if (y.size() != X.size())
            throw std::runtime_error("training rows in " + tr_features + " must all be labeled");
        ForestConfig cfg;
        cfg.n_trees = tr_trees;
        cfg.max_depth = tr_depth;
        cfg.seed = tr_seed;
        if (tr_cv) {
            std::vector<ForestConfig> grid;
            for (int trees : {50, 100, 200})
                for (int depth : {1, 2, 3}) {
                    ForestConfig g = cfg;
                    g.n_trees = trees;
                    g.max_depth = depth;
                    grid.push_back(g);
                }
            cfg = cross_validate(X, y, grid).best;
        }
        const Forest forest = train_forest(X, y, cfg);
        auto out = must_open_out(tr_out);
        forest.save(out);
        return 0;
    }

    if (*classify) {
        std::ifstream min(c_model, std::ios::binary);
        if (!min) throw std::runtime_error("cannot read " + c_model);
        const Forest forest = Forest::load(min);
        std::vector<std::vector<double>> X;
        std::vector<int> y;
        std::vector<FeatureRow> rows;
        load_labeled(c_features, X, y, rows);
        write_or_print(c_out, [&](std::ostream& out) {
            if (parse_format(c_format) == ReportFormat::Json) {
                out << "[\n";
                for (std::size_t i = 0; i < rows.size(); ++i) {
                    const auto cat = SignificanceCategory(forest.predict(X[i]));
                    out << " {\"billboard_id\": " << rows[i].billboard_id
                        << ", \"predicted\": \"" << to_string(cat) << "\"}"
                        << (i + 1 < rows.size() ? ",\n" : "\n");
                }
                out << "]\n";
            } else {
                out << "billboard_id,predicted\n";
                for (std::size_t i = 0; i < rows.size(); ++i)
                    out << rows[i].billboard_id << ','
                        << to_string(SignificanceCategory(forest.predict(X[i]))) << '\n';
            }
        });
        return 0;
    }

    if (*imp) {
        std::ifstream min(i_model, std::ios::binary);
        if (!min) throw std::runtime_error("cannot read " + i_model);
        const Forest forest = Forest::load(min);
        std::vector<std::vector<double>> X;
        std::vector<int> y;
        std::vector<FeatureRow> rows;
        load_labeled(i_features, X, y, rows);
        if (y.size() != X.size())
            throw std::runtime_error("importance needs labels on every row of " + i_features);
        const auto mdi = mdi_importance(forest);
        const auto perm = permutation_importance(forest, X, y, i_repeats, i_seed);
        ReportHeader header;
        header.version = kVersion;
        header.config = {{"model", i_model}, {"features", i_features},
                         {"seed", std::to_string(i_seed)},
                         {"repeats", std::to_string(i_repeats)}};
        write_or_print(i_out, [&](std::ostream& out) {
            write_importance_report(out, mdi, perm, parse_format(i_format), header);
        });
        return 0;
    }

    if (*sal) {
        const SaliencyGrid pred = load_saliency_grid(s_pred);
        SaliencyScore score;
        bool have_fix = false, have_gt = false;
        if (!s_gaze.empty()) {
            FixationSet fix;
            for (const auto& [frame, sample] : load_gaze(s_gaze))
                for (const auto& p : sample.points) fix.points.push_back(p);
            score.auc_judd = auc_judd(pred, fix);
            score.nss = nss(pred, fix);
            have_fix = true;
        }
        if (!s_gt.empty()) {
            const SaliencyGrid gt = load_saliency_grid(s_gt);
            score.sim = sim(pred, gt);
            score.cc = cc(pred, gt);
            have_gt = true;
        }
        if (!have_fix && !have_gt)
            throw std::runtime_error("saliency-metrics needs --gaze and/or --gt");
        write_or_print(s_out, [&](std::ostream& out) {
            if (parse_format(s_format) == ReportFormat::Json) {
                out << "{\n";
                bool first = true;
                auto field = [&](const char* k, double v) {
                    out << (first ? " " : ",\n ") << '"' << k << "\": " << format_double(v);
                    first = false;
                };
                if (have_fix) {
                    field("auc_judd", score.auc_judd);
                    field("nss", score.nss);
                }
                if (have_gt) {
                    field("sim", score.sim);
                    field("cc", score.cc);
                }
                out << "\n}\n";
            } else {
                out << "metric,value\n";
                if (have_fix) {
                    out << "auc_judd," << format_double(score.auc_judd) << '\n';
                    out << "nss," << format_double(score.nss) << '\n';
                }
                if (have_gt) {
                    out << "sim," << format_double(score.sim) << '\n';
                    out << "cc," << format_double(score.cc) << '\n';
                }
            }
        });
        return 0;
    }

    if (*synth) {
        ScenarioConfig cfg;
        if (!sy_config.empty()) {
            std::ifstream in(sy_config, std::ios::binary);
            if (!in) throw std::runtime_error("cannot read " + sy_config);
            cfg = parse_scenario_config(in);
        }
        if (synth->count("--seed")) cfg.seed = sy_seed;
        if (synth->count("--drivers")) cfg.n_drivers = sy_drivers;
        if (synth->count("--billboards")) cfg.n_billboards = sy_billboards;
        if (synth->count("--frames")) cfg.frames_per_driver = sy_frames;
        if (synth->count("--center-jitter")) cfg.noise.center_jitter = sy_jitter;
        if (synth->count("--size-jitter")) cfg.noise.size_jitter = sy_size_jitter;
        if (synth->count("--miss-prob")) cfg.noise.miss_prob = sy_miss;
        if (synth->count("--fp-rate")) cfg.noise.fp_rate = sy_fp;
        write_scenario(generate(cfg), sy_out);
        return 0;
    }

    if (*pipe) {
        PipelineConfig cfg;
        cfg.scenario_dir = p_scenario;
        cfg.out_dir = p_out;
        cfg.seed = p_seed;
        cfg.tracker.variant = parse_variant(p_variant);
        cfg.tracker.min_hits = p_min_hits;
        cfg.forest.n_trees = p_trees;
        cfg.forest.max_depth = p_depth;
        cfg.test_size = p_test_size;
        cfg.format = parse_format(p_format);
        const PipelineResult r = run_pipeline(cfg);
        std::cout << "drivers=" << r.driver_ids.size()
                  << " billboards=" << r.features.size()
                  << " HOTA=" << format_metric(r.hota.hota)
                  << " test_accuracy=" << format_double(r.test_accuracy) << '\n';
        return 0;
    }

    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
