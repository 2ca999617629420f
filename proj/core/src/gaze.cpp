#include "bbsig/gaze.hpp"

#include <algorithm>
#include <stdexcept>

namespace bbsig {

const char* to_string(SignificanceCategory c) {
    switch (c) {
        case SignificanceCategory::None: return "None";
        case SignificanceCategory::Short: return "Short";
        case SignificanceCategory::Long: return "Long";
    }
    return "?";
}

std::optional<SignificanceCategory> category_from_string(const std::string& s) {
    if (s == "None") return SignificanceCategory::None;
    if (s == "Short") return SignificanceCategory::Short;
    if (s == "Long") return SignificanceCategory::Long;
    return std::nullopt;
}

std::optional<GazeSample> resolve_fixations(const GazeMap& gaze, int frame,
                                            const ImageDims& dims) {
    if (frame < 1) throw std::invalid_argument("frame index must be >= 1");
    const auto it = gaze.find(frame);
    if (it != gaze.end() && !it->second.points.empty()) return it->second;

    const auto p1 = gaze.find(frame - 1);
    const auto p2 = gaze.find(frame - 2);
    if (p1 == gaze.end() || p1->second.points.empty() ||
        p2 == gaze.end() || p2->second.points.empty())
        return std::nullopt;

    const GazePoint& a = p1->second.points.front();
    const GazePoint& b = p2->second.points.front();
    GazePoint e{2.0 * a.x - b.x, 2.0 * a.y - b.y};
    e.x = std::clamp(e.x, 0.0, double(dims.width));
    e.y = std::clamp(e.y, 0.0, double(dims.height));

    GazeSample s;
    s.frame = frame;
    s.points = {e};
    s.provenance = GazeProvenance::Extrapolated;
    return s;
}

DwellRecord gaze_duration(const std::vector<std::pair<int, BoundingBox>>& track_frames,
                          const GazeMap& gaze, double fps, const ImageDims& dims) {
    if (fps <= 0.0) throw std::invalid_argument("fps must be positive");
    DwellRecord r;
    r.frames_visible = int(track_frames.size());
    for (const auto& [frame, box] : track_frames) {
        const auto s = resolve_fixations(gaze, frame, dims);
        if (!s) continue;
        const bool gazed = std::any_of(s->points.begin(), s->points.end(),
                                       [&](const GazePoint& p) { return box.contains(p.x, p.y); });
        if (gazed) r.frames_gazed += 1;
    }
    r.gaze_ms = r.frames_gazed * (1000.0 / fps);
    return r;
}

double aggregate_significance(std::vector<double> per_driver_ms, int driver_count) {
    if (driver_count < 1) throw std::invalid_argument("driver_count must be >= 1");
    if (int(per_driver_ms.size()) > driver_count)
        throw std::invalid_argument("more records than drivers");
    per_driver_ms.resize(std::size_t(driver_count), 0.0);
    std::sort(per_driver_ms.begin(), per_driver_ms.end());
    const std::size_t n = per_driver_ms.size();
    if (n % 2 == 1) return per_driver_ms[n / 2];
    return 0.5 * (per_driver_ms[n / 2 - 1] + per_driver_ms[n / 2]);
}

SignificanceCategory categorize(double median_ms) {
    if (median_ms < 0.0) throw std::invalid_argument("negative gaze duration");
    if (median_ms == 0.0) return SignificanceCategory::None;
    if (median_ms < 250.0) return SignificanceCategory::Short;
    return SignificanceCategory::Long;
}

}  // namespace bbsig
