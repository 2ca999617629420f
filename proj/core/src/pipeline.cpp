#include "bbsig/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <set>
#include <stdexcept>

namespace bbsig {

namespace fs = std::filesystem;

namespace {

DetectionMap group_by_frame(const std::vector<FrameDetection>& dets) {
    DetectionMap out;
    for (const auto& d : dets) out[d.frame].push_back(d);
    return out;
}

struct DriverData {
    std::string driver_id;
    fs::path dir;
    SequenceMeta meta;
    DetectionMap gt;
    DetectionMap tracked;
    GazeMap gaze;
    // billboard id -> per-frame box, from aligned tracker output
    std::map<int, std::map<int, BoundingBox>> billboard_frames;
};

std::ofstream open_out(const fs::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    return out;
}

}  // namespace

std::map<int, int> align_track_ids(const DetectionMap& tracked, const DetectionMap& gt) {
    // Per track id, accumulate IoU with the best-overlapping GT box of each
    // frame; the GT id with the largest total wins.
    std::map<int, std::map<int, double>> votes;
    for (const auto& [frame, dets] : tracked) {
        const auto git = gt.find(frame);
        if (git == gt.end()) continue;
        for (const auto& d : dets) {
            int best_id = -1;
            double best_iou = 0.0;
            for (const auto& g : git->second) {
                const double v = iou(d.box, g.box);
                if (v > best_iou) {
                    best_iou = v;
                    best_id = g.id;
                }
            }
            if (best_id >= 0) votes[d.id][best_id] += best_iou;
        }
    }
    std::map<int, int> mapping;
    for (const auto& [tid, tally] : votes) {
        int best_id = -1;
        double best = 0.0;
        for (const auto& [gid, total] : tally) {
            if (total > best) {
                best = total;
                best_id = gid;
            }
        }
        if (best_id >= 0) mapping[tid] = best_id;
    }
    return mapping;
}

PipelineResult run_pipeline(const PipelineConfig& cfg) {
    const fs::path drivers_dir = cfg.scenario_dir / "drivers";
    if (!fs::is_directory(drivers_dir))
        throw std::runtime_error("missing drivers directory under " + cfg.scenario_dir.string());

    std::vector<fs::path> driver_dirs;
    for (const auto& e : fs::directory_iterator(drivers_dir))
        if (e.is_directory()) driver_dirs.push_back(e.path());
    std::sort(driver_dirs.begin(), driver_dirs.end());
    if (driver_dirs.empty())
        throw std::runtime_error("no driver sequences in " + drivers_dir.string());

    PipelineResult result;
    std::vector<DriverData> drivers;
    std::vector<std::pair<DetectionMap, DetectionMap>> hota_pairs;

    for (const auto& dir : driver_dirs) {
        DriverData d;
        d.dir = dir;
        d.driver_id = dir.filename().string();
        d.meta = load_meta(dir / "meta.txt");
        d.gt = load_detections(dir / "gt.txt");
        d.gaze = load_gaze(dir / "gaze.txt");
        const DetectionMap raw = load_detections(dir / "det.txt");
        d.tracked = group_by_frame(track_sequence(raw, cfg.tracker, d.meta));
        hota_pairs.emplace_back(d.gt, d.tracked);

        const auto id_map = align_track_ids(d.tracked, d.gt);
        for (const auto& [frame, dets] : d.tracked) {
            const auto git = d.gt.find(frame);
            for (const auto& det : dets) {
                const auto mit = id_map.find(det.id);
                if (mit == id_map.end()) continue;
                const int bid = mit->second;
                auto& per_frame = d.billboard_frames[bid];
                const auto existing = per_frame.find(frame);
                if (existing == per_frame.end()) {
                    per_frame.emplace(frame, det.box);
                    continue;
                }
                // Fragmented tracks can land two boxes on one frame; keep
                // the one closer to the GT box when it is present.
                if (git == d.gt.end()) continue;
                for (const auto& g : git->second) {
                    if (g.id != bid) continue;
                    if (iou(det.box, g.box) > iou(existing->second, g.box))
                        existing->second = det.box;
                    break;
                }
            }
        }
        result.driver_ids.push_back(d.driver_id);
        drivers.push_back(std::move(d));
    }

    result.hota = evaluate_hota_multi(hota_pairs);

    // Billboard universe: every id the ground truth knows about.
    std::set<int> billboard_ids;
    for (const auto& d : drivers)
        for (const auto& [frame, dets] : d.gt)
            for (const auto& det : dets) billboard_ids.insert(det.id);

    const int n_drivers = int(drivers.size());
    std::map<int, std::vector<double>> per_driver_ms;
    std::map<int, std::vector<FeatureVector>> per_driver_features;

    for (auto& d : drivers) {
        // One lazily populated saliency cache per driver session.
        auto cache = std::make_shared<std::map<int, std::optional<SaliencyGrid>>>();
        const fs::path sal_dir = d.dir / "saliency";
        SaliencyLookup lookup = [cache, sal_dir](int frame) -> const SaliencyGrid* {
            auto it = cache->find(frame);
            if (it == cache->end()) {
                const fs::path p = sal_dir / saliency_frame_name(frame);
                std::optional<SaliencyGrid> grid;
                if (fs::exists(p)) grid = load_saliency_grid(p);
                it = cache->emplace(frame, std::move(grid)).first;
            }
            return it->second ? &*it->second : nullptr;
        };

        for (const auto& [bid, frames] : d.billboard_frames) {
            SessionTrack track;
            track.frames.assign(frames.begin(), frames.end());
            const DwellRecord rec = gaze_duration(track.frames, d.gaze, d.meta.fps, d.meta.dims);
            DwellRecord named = rec;
            named.billboard_id = bid;
            named.driver_id = d.driver_id;
            result.dwell.push_back(named);
            per_driver_ms[bid].push_back(named.gaze_ms);
            per_driver_features[bid].push_back(
                extract_session_features(track, lookup, d.meta));
        }
    }

    for (const int bid : billboard_ids) {
        const auto pit = per_driver_ms.find(bid);
        const double median = aggregate_significance(
            pit == per_driver_ms.end() ? std::vector<double>{} : pit->second, n_drivers);
        const SignificanceCategory cat = categorize(median);
        result.median_by_id[bid] = median;
        result.category_by_id[bid] = cat;
        result.categories.counts[std::size_t(cat)] += 1;
        result.categories.per_billboard.emplace_back(bid, cat);
        result.categories.median_ms[bid] = median;

        FeatureRow row;
        row.billboard_id = bid;
        const auto fit = per_driver_features.find(bid);
        if (fit != per_driver_features.end()) row.features = combine_sessions(fit->second);
        row.label = to_string(cat);
        result.features.push_back(std::move(row));
    }

    // Train/test split over billboards, stratified by category.
    const int n = int(result.features.size());
    std::vector<SignificanceCategory> labels;
    std::vector<std::vector<double>> X;
    std::vector<int> y;
    for (const auto& row : result.features) {
        const auto cat = *category_from_string(row.label);
        labels.push_back(cat);
        X.push_back(row.features.as_row());
        y.push_back(int(cat));
    }
    int test_size = cfg.test_size;
    if (test_size <= 0) test_size = std::max(1, int(std::lround(n * 0.2)));
    if (test_size >= n) throw std::runtime_error("test size leaves no training rows");
    result.split = build_dataset(labels, n - test_size, test_size, cfg.seed);

    std::vector<std::vector<double>> X_train, X_test;
    std::vector<int> y_train, y_test;
    for (int i : result.split.train_indices) {
        X_train.push_back(X[std::size_t(i)]);
        y_train.push_back(y[std::size_t(i)]);
    }
    for (int i : result.split.test_indices) {
        X_test.push_back(X[std::size_t(i)]);
        y_test.push_back(y[std::size_t(i)]);
    }

    ForestConfig fc = cfg.forest;
    fc.seed = cfg.seed;
    result.forest = train_forest(X_train, y_train, fc);

    std::vector<int> y_pred;
    for (const auto& x : X_test) y_pred.push_back(result.forest.predict(x));
    result.confusion = confusion_matrix(y_test, y_pred);
    int correct = 0;
    for (std::size_t i = 0; i < y_pred.size(); ++i)
        if (y_pred[i] == y_test[i]) ++correct;
    result.test_accuracy = y_test.empty() ? 0.0 : double(correct) / double(y_test.size());

    result.mdi = mdi_importance(result.forest);
    result.permutation = permutation_importance(result.forest, X_test, y_test, 20, cfg.seed);

    if (!cfg.out_dir.empty()) {
        fs::create_directories(cfg.out_dir);
        const char* ext = cfg.format == ReportFormat::Json ? ".json" : ".csv";

        ReportHeader header;
        header.config = {
            {"scenario", cfg.scenario_dir.string()},
            {"seed", std::to_string(cfg.seed)},
            {"tracker", cfg.tracker.variant == TrackerVariant::TwoStage ? "two-stage" : "baseline"},
            {"min_hits", std::to_string(cfg.tracker.min_hits)},
            {"trees", std::to_string(fc.n_trees)},
            {"depth", std::to_string(fc.max_depth)},
            {"test_size", std::to_string(test_size)},
        };

        const fs::path tracks_dir = cfg.out_dir / "tracks";
        fs::create_directories(tracks_dir);
        for (const auto& d : drivers) {
            auto out = open_out(tracks_dir / (d.driver_id + ".txt"));
            write_detections(out, d.tracked);
        }
        {
            auto out = open_out(cfg.out_dir / (std::string("hota") + ext));
            write_hota_report(out, {{"tracker", result.hota}}, cfg.format, false, header);
        }
        {
            auto out = open_out(cfg.out_dir / (std::string("dwell") + ext));
            write_dwell_report(out, result.dwell, cfg.format, header);
        }
        {
            auto out = open_out(cfg.out_dir / (std::string("categories") + ext));
            write_category_report(out, result.categories, cfg.format, header);
        }
        {
            auto out = open_out(cfg.out_dir / "features.csv");
            write_features_csv(out, result.features);
        }
        {
            auto out = open_out(cfg.out_dir / (std::string("confusion") + ext));
            write_confusion_report(out, result.confusion, cfg.format, header);
        }
        {
            auto out = open_out(cfg.out_dir / (std::string("importance") + ext));
            write_importance_report(out, result.mdi, result.permutation, cfg.format, header);
        }
        {
            auto out = open_out(cfg.out_dir / "model.json");
            result.forest.save(out);
        }
    }

    return result;
}

}  // namespace bbsig
