#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bbsig/geometry.hpp"
#include "bbsig/io.hpp"

namespace bbsig {

enum class SignificanceCategory { None = 0, Short = 1, Long = 2 };

const char* to_string(SignificanceCategory c);
std::optional<SignificanceCategory> category_from_string(const std::string& s);

struct DwellRecord {
    int billboard_id = 0;
    std::string driver_id;
    int frames_gazed = 0;
    double gaze_ms = 0.0;
    int frames_visible = 0;
};

/// Fixation points effective at `frame`: recorded points when present,
/// otherwise a linear extrapolation 2*p(t-1) - p(t-2) of the first recorded
/// point of each of the two previous frames (clamped to the frame bounds).
/// Returns nullopt when neither source is available (frame skipped).
/// Extrapolated points never seed further extrapolation.
std::optional<GazeSample> resolve_fixations(const GazeMap& gaze, int frame,
                                            const ImageDims& dims);

/// Per-session dwell of one billboard: a frame counts as gazed when any
/// resolved fixation point lies inside the box (boundary inclusive).
DwellRecord gaze_duration(const std::vector<std::pair<int, BoundingBox>>& track_frames,
                          const GazeMap& gaze, double fps, const ImageDims& dims);

/// Median dwell across exactly driver_count drivers; drivers without a
/// record contribute 0 ms. Even count: mean of the two middle values.
double aggregate_significance(std::vector<double> per_driver_ms, int driver_count);

/// 0 ms -> None, (0, 250) -> Short, >= 250 -> Long.
SignificanceCategory categorize(double median_ms);

}  // namespace bbsig
