#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "bbsig/gaze.hpp"
#include "bbsig/geometry.hpp"
#include "bbsig/io.hpp"

namespace bbsig {

/// The seven gaze-independent billboard features.
///   f1  frames visible
///   f2  dominant frame section (Left=0, Center=1, Right=2)
///   f3  mean distance of the box center from the frame center, px
///   f4  mean box area as a fraction of the frame area
///   f5  mean area fraction over the 10 largest-box frames
///   f6  mean of in-box saliency values > 50 (0-255 scale)
///   f7  mean ratio of in-box to whole-frame thresholded saliency
struct FeatureVector {
    double f1_visibility_frames = 0.0;
    double f2_region_code = 0.0;
    double f3_center_distance = 0.0;
    double f4_mean_area = 0.0;
    double f5_top10_area = 0.0;
    double f6_mean_saliency = 0.0;
    double f7_saliency_ratio = 0.0;

    std::vector<double> as_row() const {
        return {f1_visibility_frames, f2_region_code, f3_center_distance,
                f4_mean_area, f5_top10_area, f6_mean_saliency, f7_saliency_ratio};
    }
};

constexpr int kNumFeatures = 7;

/// One billboard's track within one driver session.
struct SessionTrack {
    std::vector<std::pair<int, BoundingBox>> frames;
};

/// Returns the saliency grid for a frame, or nullptr when unavailable.
using SaliencyLookup = std::function<const SaliencyGrid*(int frame)>;

struct ExtractionStats {
    int frames_total = 0;
    int frames_missing_saliency = 0;
};

FeatureVector extract_session_features(const SessionTrack& track,
                                       const SaliencyLookup& saliency,
                                       const SequenceMeta& meta,
                                       ExtractionStats* stats = nullptr);

/// Session average: arithmetic mean for the numeric features, mode for the
/// region code with ties resolved toward Center.
FeatureVector combine_sessions(const std::vector<FeatureVector>& vectors);

struct DatasetSplit {
    std::vector<int> train_indices;
    std::vector<int> test_indices;
};

/// Deterministic stratified split; train_size + test_size must equal the
/// number of labels.
DatasetSplit build_dataset(const std::vector<SignificanceCategory>& labels,
                           int train_size, int test_size, std::uint64_t seed);

}  // namespace bbsig
