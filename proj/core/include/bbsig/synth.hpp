#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bbsig/gaze.hpp"
#include "bbsig/geometry.hpp"
#include "bbsig/io.hpp"

namespace bbsig {

struct NoiseConfig {
    double center_jitter = 0.0;  // stddev, px
    double size_jitter = 0.0;    // stddev, px
    double miss_prob = 0.0;
    double fp_rate = 0.0;  // expected false positives per frame
};

/// Desk-scale drive-past scenario: each billboard makes one smooth approach
/// pass per driver with geometrically growing area, gaze realizes a planned
/// per-(driver,billboard) dwell exactly, and saliency grids carry Gaussian
/// mass at the planned fixations.
struct ScenarioConfig {
    std::uint64_t seed = 1;
    int n_billboards = 20;
    int n_drivers = 8;
    double fps = 25.0;
    ImageDims dims{960, 540};
    ImageDims saliency_dims{96, 54};
    int frames_per_driver = 2000;
    int frames_per_pass = 80;
    double growth_ratio = 1.01;       // area growth per frame
    double start_area_fraction = 0.025;
    NoiseConfig noise;
    double saliency_sigma = 4.0;  // px, in saliency-grid coordinates
    double conf_low = 0.1;        // false-positive confidence band
    double conf_high = 0.5;
    /// Planned dwell frames per (driver index, billboard id); entries absent
    /// from the map fall back to the built-in category cycle.
    std::map<std::pair<int, int>, int> dwell_override;
};

struct DriverSequence {
    SequenceMeta meta;
    std::vector<FrameDetection> gt;
    std::vector<FrameDetection> detections;
    GazeMap gaze;
};

struct BillboardOracle {
    int billboard_id = 0;
    std::vector<double> per_driver_ms;
    double median_ms = 0.0;
    SignificanceCategory category = SignificanceCategory::None;
};

struct Scenario {
    ScenarioConfig config;
    std::vector<DriverSequence> drivers;
    std::vector<BillboardOracle> oracle;
};

Scenario generate(const ScenarioConfig& cfg);

/// Saliency grid for one frame of a generated sequence (Gaussian kernels at
/// that frame's fixation points, scaled into saliency-grid coordinates).
SaliencyGrid synth_saliency_frame(const GazeSample& sample, const ScenarioConfig& cfg);

/// Writes the directory layout consumed by the CLI subcommands:
///   scenario.json, drivers/<id>/{meta.txt,gt.txt,det.txt,gaze.txt,saliency/}
void write_scenario(const Scenario& scenario, const std::filesystem::path& dir);

ScenarioConfig parse_scenario_config(std::istream& in);  // JSON
std::vector<BillboardOracle> load_scenario_oracle(const std::filesystem::path& scenario_json);

/// Compares pipeline outputs against the scenario's planned ground truth.
/// Returns human-readable mismatch lines; empty means pass.
std::vector<std::string> oracle_check(
    const Scenario& scenario,
    const std::map<int, SignificanceCategory>& recovered_categories,
    const std::map<int, double>& recovered_median_ms,
    std::optional<double> hota_on_noiseless);

}  // namespace bbsig
