#include "bbsig/tracker.hpp"

#include <algorithm>
#include <stdexcept>

#include "bbsig/hungarian.hpp"

namespace bbsig {

namespace {

constexpr double kAreaFloor = 1e-6;

Eigen::Matrix<double, 4, 1> box_to_z(const BoundingBox& b) {
    Eigen::Matrix<double, 4, 1> z;
    z << b.center_x(), b.center_y(), b.area(), b.w / b.h;
    return z;
}

}  // namespace

KalmanBoxFilter::KalmanBoxFilter(const BoundingBox& b, const KalmanParams& params)
    : params_(params) {
    x_.setZero();
    x_.head<4>() = box_to_z(b);
    P_ = params.initial_cov.asDiagonal();
}

void KalmanBoxFilter::predict() {
    // keep predicted area positive
    if (x_(2) + x_(6) <= kAreaFloor) x_(6) = 0.0;

    Eigen::Matrix<double, 7, 7> F = Eigen::Matrix<double, 7, 7>::Identity();
    F(0, 4) = F(1, 5) = F(2, 6) = 1.0;
    x_ = F * x_;
    if (x_(2) < kAreaFloor) x_(2) = kAreaFloor;
    P_ = F * P_ * F.transpose();
    P_ += Eigen::Matrix<double, 7, 7>(params_.process_noise.asDiagonal());
    P_ = 0.5 * (P_ + P_.transpose()).eval();
}

void KalmanBoxFilter::update(const BoundingBox& measurement) {
    Eigen::Matrix<double, 4, 7> H = Eigen::Matrix<double, 4, 7>::Zero();
    H(0, 0) = H(1, 1) = H(2, 2) = H(3, 3) = 1.0;
    const Eigen::Matrix<double, 4, 4> R = params_.measurement_noise.asDiagonal();

    const Eigen::Matrix<double, 4, 1> y = box_to_z(measurement) - H * x_;
    const Eigen::Matrix<double, 4, 4> S = H * P_ * H.transpose() + R;
    const Eigen::Matrix<double, 7, 4> K = P_ * H.transpose() * S.inverse();

    x_ += K * y;
    if (x_(2) < kAreaFloor) x_(2) = kAreaFloor;
    if (x_(3) < kAreaFloor) x_(3) = kAreaFloor;

    // Joseph form keeps the covariance PSD
    const Eigen::Matrix<double, 7, 7> IKH =
        Eigen::Matrix<double, 7, 7>::Identity() - K * H;
    P_ = IKH * P_ * IKH.transpose() + K * R * K.transpose();
    P_ = 0.5 * (P_ + P_.transpose()).eval();
}

BoundingBox KalmanBoxFilter::box() const {
    const double s = std::max(x_(2), kAreaFloor);
    const double r = std::max(x_(3), kAreaFloor);
    const double w = std::sqrt(s * r);
    const double h = s / w;
    return BoundingBox{x_(0) - 0.5 * w, x_(1) - 0.5 * h, w, h};
}

void predict_track(TrackState& t) {
    t.kf.predict();
    t.age += 1;
    if (t.time_since_update > 0) t.hit_streak = 0;
    t.time_since_update += 1;
}

void update_track(TrackState& t, const FrameDetection& d, int min_hits) {
    t.kf.update(d.box);
    t.time_since_update = 0;
    t.hit_streak += 1;
    t.last_confidence = d.confidence;
    t.last_box = d.box;
    if (t.status == TrackStatus::Tentative && t.hit_streak >= min_hits)
        t.status = TrackStatus::Confirmed;
}

std::vector<FrameDetection> Tracker::step(int frame,
                                          const std::vector<FrameDetection>& detections) {
    if (frame <= last_frame_)
        throw std::invalid_argument("tracker fed non-monotone frame index");
    last_frame_ = frame;

    for (auto& t : tracks_) predict_track(t);

    // split detections by confidence band
    std::vector<int> high, mid;
    for (int j = 0; j < int(detections.size()); ++j) {
        const double c = detections[j].confidence;
        if (c >= cfg_.conf_high)
            high.push_back(j);
        else if (cfg_.variant == TrackerVariant::TwoStage && c >= cfg_.conf_low)
            mid.push_back(j);
    }

    std::vector<BoundingBox> track_boxes;
    track_boxes.reserve(tracks_.size());
    for (const auto& t : tracks_) track_boxes.push_back(t.kf.box());

    std::vector<char> track_matched(tracks_.size(), 0);
    std::vector<int> matched_det(tracks_.size(), -1);

    auto run_stage = [&](const std::vector<int>& det_idx, const std::vector<int>& trk_idx) {
        if (trk_idx.empty()) return;
        std::vector<BoundingBox> tb, db;
        for (int i : trk_idx) tb.push_back(track_boxes[i]);
        for (int j : det_idx) db.push_back(detections[j].box);
        const auto assoc = associate(tb, db, cfg_.iou_threshold);
        for (const auto& [ti, dj] : assoc.matches) {
            track_matched[trk_idx[ti]] = 1;
            matched_det[trk_idx[ti]] = det_idx[dj];
        }
    };

    std::vector<int> all_tracks(tracks_.size());
    for (int i = 0; i < int(tracks_.size()); ++i) all_tracks[i] = i;
    run_stage(high, all_tracks);

    if (cfg_.variant == TrackerVariant::TwoStage && !mid.empty()) {
        std::vector<int> leftover;
        for (int i = 0; i < int(tracks_.size()); ++i)
            if (!track_matched[i]) leftover.push_back(i);
        run_stage(mid, leftover);
    }

    std::vector<char> det_used(detections.size(), 0);
    for (int i = 0; i < int(tracks_.size()); ++i) {
        if (track_matched[i]) {
            update_track(tracks_[i], detections[matched_det[i]], cfg_.min_hits);
            det_used[matched_det[i]] = 1;
        }
    }

    // spawn new tracks from unmatched high-confidence detections
    for (int j : high) {
        if (det_used[j]) continue;
        TrackState t;
        t.track_id = next_id_++;
        t.kf = KalmanBoxFilter(detections[j].box, cfg_.kalman);
        t.age = 1;
        t.hit_streak = 1;
        t.last_confidence = detections[j].confidence;
        t.last_box = detections[j].box;
        t.status = cfg_.min_hits <= 1 ? TrackStatus::Confirmed : TrackStatus::Tentative;
        tracks_.push_back(std::move(t));
    }

    for (auto& t : tracks_)
        if (t.time_since_update > cfg_.max_age) t.status = TrackStatus::Deleted;
    std::erase_if(tracks_, [](const TrackState& t) { return t.status == TrackStatus::Deleted; });

    std::vector<FrameDetection> out;
    for (const auto& t : tracks_) {
        if (t.status != TrackStatus::Confirmed || t.time_since_update != 0) continue;
        FrameDetection d;
        d.frame = frame;
        d.id = t.track_id;
        d.box = t.last_box;
        d.confidence = t.last_confidence;
        out.push_back(d);
    }
    return out;
}

std::vector<FrameDetection> track_sequence(const DetectionMap& detections,
                                           const TrackerConfig& cfg,
                                           const SequenceMeta& meta) {
    (void)meta;
    Tracker tracker(cfg);
    std::vector<FrameDetection> out;
    if (detections.empty()) return out;
    if (detections.begin()->first < 1)
        throw std::invalid_argument("frame indices must be >= 1");
    const int last = detections.rbegin()->first;
    static const std::vector<FrameDetection> kEmpty;
    for (int frame = 1; frame <= last; ++frame) {
        const auto it = detections.find(frame);
        const auto& dets = it == detections.end() ? kEmpty : it->second;
        auto tracked = tracker.step(frame, dets);
        out.insert(out.end(), tracked.begin(), tracked.end());
    }
    return out;
}

}  // namespace bbsig
