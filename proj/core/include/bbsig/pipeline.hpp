#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "bbsig/features.hpp"
#include "bbsig/forest.hpp"
#include "bbsig/gaze.hpp"
#include "bbsig/hota.hpp"
#include "bbsig/report.hpp"
#include "bbsig/tracker.hpp"

namespace bbsig {

/// End-to-end run over a scenario directory
/// (drivers/<id>/{meta.txt,gt.txt,det.txt,gaze.txt,saliency/}):
/// track -> dwell/labels -> features -> split/train -> reports.
struct PipelineConfig {
    std::filesystem::path scenario_dir;
    std::filesystem::path out_dir;  // empty: compute only, write nothing
    TrackerConfig tracker;
    ForestConfig forest;
    int test_size = 0;  // 0: ~20% of billboards, at least 1
    std::uint64_t seed = 42;
    ReportFormat format = ReportFormat::Csv;
};

struct PipelineResult {
    std::vector<std::string> driver_ids;
    HotaResult hota;  // raw tracker output vs ground truth, pooled
    std::vector<DwellRecord> dwell;
    CategoryReport categories;
    std::map<int, SignificanceCategory> category_by_id;
    std::map<int, double> median_by_id;
    std::vector<FeatureRow> features;  // one row per billboard, labeled
    DatasetSplit split;
    Forest forest;
    std::array<std::array<int, 3>, 3> confusion{};
    double test_accuracy = 0.0;
    std::vector<double> mdi;
    std::vector<double> permutation;
};

/// Tracker output carries arbitrary ids; billboard identity across drivers
/// comes from the ground-truth tracks, so each output track is mapped to the
/// ground-truth id it overlaps most (summed IoU vote, best-per-frame).
std::map<int, int> align_track_ids(const DetectionMap& tracked, const DetectionMap& gt);

PipelineResult run_pipeline(const PipelineConfig& cfg);

}  // namespace bbsig
