#pragma once

#include <Eigen/Dense>
#include <vector>

#include "bbsig/geometry.hpp"
#include "bbsig/io.hpp"

namespace bbsig {

enum class TrackStatus { Tentative, Confirmed, Deleted };
enum class TrackerVariant { Baseline, TwoStage };

/// Kalman noise parameters for the (u, v, s, r, du, dv, ds) box model.
struct KalmanParams {
    Eigen::Matrix<double, 7, 1> initial_cov{10, 10, 10, 10, 1e4, 1e4, 1e4};
    Eigen::Matrix<double, 7, 1> process_noise{1, 1, 1, 1, 0.01, 0.01, 1e-4};
    Eigen::Matrix<double, 4, 1> measurement_noise{1, 1, 10, 10};
};

struct TrackerConfig {
    double iou_threshold = 0.3;
    int max_age = 30;
    int min_hits = 3;
    TrackerVariant variant = TrackerVariant::Baseline;
    double conf_high = 0.5;  // also the Baseline minimum detection confidence
    double conf_low = 0.1;
    KalmanParams kalman;
};

/// Constant-velocity Kalman filter over box center, area, and aspect ratio.
/// State: (u, v, s, r, du, dv, ds); aspect ratio r carries no velocity.
class KalmanBoxFilter {
public:
    KalmanBoxFilter() = default;
    KalmanBoxFilter(const BoundingBox& b, const KalmanParams& params);

    void predict();
    void update(const BoundingBox& measurement);

    BoundingBox box() const;
    const Eigen::Matrix<double, 7, 1>& mean() const { return x_; }
    const Eigen::Matrix<double, 7, 7>& covariance() const { return P_; }

private:
    Eigen::Matrix<double, 7, 1> x_ = Eigen::Matrix<double, 7, 1>::Zero();
    Eigen::Matrix<double, 7, 7> P_ = Eigen::Matrix<double, 7, 7>::Identity();
    KalmanParams params_;
};

struct TrackState {
    int track_id = 0;
    KalmanBoxFilter kf;
    int age = 0;
    int time_since_update = 0;
    int hit_streak = 0;
    TrackStatus status = TrackStatus::Tentative;
    double last_confidence = 0.0;
    BoundingBox last_box;  // most recent matched detection; reported verbatim
};

/// Time update of one track: constant-velocity prediction plus lifecycle
/// bookkeeping (age, time_since_update, hit_streak reset after a miss).
void predict_track(TrackState& t);

/// Measurement update of one track; promotes Tentative tracks once
/// hit_streak reaches min_hits.
void update_track(TrackState& t, const FrameDetection& d, int min_hits);

/// Stateful per-sequence SORT-style tracker. Feed frames in ascending order.
class Tracker {
public:
    explicit Tracker(const TrackerConfig& cfg) : cfg_(cfg) {}

    /// Processes one frame and returns the confirmed, updated tracks as
    /// detections carrying stable track ids.
    std::vector<FrameDetection> step(int frame, const std::vector<FrameDetection>& detections);

    const std::vector<TrackState>& tracks() const { return tracks_; }

private:
    TrackerConfig cfg_;
    std::vector<TrackState> tracks_;
    int next_id_ = 1;
    int last_frame_ = 0;
};

/// Runs a tracker over a whole sequence (frames 1..max, gaps included).
std::vector<FrameDetection> track_sequence(const DetectionMap& detections,
                                           const TrackerConfig& cfg,
                                           const SequenceMeta& meta);

}  // namespace bbsig
