#include "bbsig/features.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "bbsig/rng.hpp"

namespace bbsig {

namespace {

constexpr double kSaliencyThreshold = 50.0;

/// Mean of in-box values > 50 and of whole-frame values > 50, for one frame.
/// The box is given in video coordinates and scaled onto the grid.
struct FrameSaliency {
    double box_mean = 0.0;    // 0 when no in-box value clears the threshold
    bool frame_defined = false;
    double frame_mean = 0.0;
};

FrameSaliency frame_saliency(const SaliencyGrid& grid, const BoundingBox& box,
                             const ImageDims& video_dims) {
    const double sx = double(grid.dims.width) / double(video_dims.width);
    const double sy = double(grid.dims.height) / double(video_dims.height);
    const int x0 = std::max(0, int(std::floor(box.x * sx)));
    const int y0 = std::max(0, int(std::floor(box.y * sy)));
    const int x1 = std::min(grid.dims.width, int(std::ceil(box.right() * sx)));
    const int y1 = std::min(grid.dims.height, int(std::ceil(box.bottom() * sy)));

    double box_sum = 0.0;
    long long box_n = 0;
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            const double v = grid.at(x, y);
            if (v > kSaliencyThreshold) {
                box_sum += v;
                ++box_n;
            }
        }
    }
    double frame_sum = 0.0;
    long long frame_n = 0;
    for (const auto v : grid.values) {
        if (v > kSaliencyThreshold) {
            frame_sum += v;
            ++frame_n;
        }
    }

    FrameSaliency out;
    if (box_n > 0) out.box_mean = box_sum / double(box_n);
    if (frame_n > 0) {
        out.frame_defined = true;
        out.frame_mean = frame_sum / double(frame_n);
    }
    return out;
}

}  // namespace

FeatureVector extract_session_features(const SessionTrack& track,
                                       const SaliencyLookup& saliency,
                                       const SequenceMeta& meta,
                                       ExtractionStats* stats) {
    if (track.frames.empty()) throw std::invalid_argument("empty session track");
    const int n = int(track.frames.size());
    const double frame_area = meta.dims.area();

    FeatureVector fv;
    fv.f1_visibility_frames = double(n);

    std::array<int, 3> region_frames{0, 0, 0};
    double dist_sum = 0.0;
    std::vector<double> area_fractions;
    area_fractions.reserve(track.frames.size());
    double sal_sum = 0.0, ratio_sum = 0.0;
    int sal_frames = 0, missing = 0;

    for (const auto& [frame, box] : track.frames) {
        const double cx = std::clamp(box.center_x(), 0.0, double(meta.dims.width));
        region_frames[int(region_of(cx, meta.dims))] += 1;
        dist_sum += center_distance(box, meta.dims);
        area_fractions.push_back(box.area() / frame_area);

        const SaliencyGrid* grid = saliency ? saliency(frame) : nullptr;
        if (!grid) {
            ++missing;
            continue;
        }
        ++sal_frames;
        const auto fs = frame_saliency(*grid, box, meta.dims);
        sal_sum += fs.box_mean;
        if (fs.frame_defined) ratio_sum += fs.box_mean / fs.frame_mean;
    }

    // dominant region; ties resolved toward Center, then the lower code
    {
        int best = 0;
        for (int r = 1; r < 3; ++r)
            if (region_frames[r] > region_frames[best] ||
                (region_frames[r] == region_frames[best] && r == 1))
                best = r;
        fv.f2_region_code = double(best);
    }

    fv.f3_center_distance = dist_sum / n;

    double area_sum = 0.0;
    for (double a : area_fractions) area_sum += a;
    fv.f4_mean_area = area_sum / n;

    std::sort(area_fractions.begin(), area_fractions.end(), std::greater<>());
    const int top = std::min<int>(10, n);
    double top_sum = 0.0;
    for (int i = 0; i < top; ++i) top_sum += area_fractions[i];
    fv.f5_top10_area = top_sum / top;

    if (sal_frames > 0) {
        fv.f6_mean_saliency = sal_sum / sal_frames;
        fv.f7_saliency_ratio = ratio_sum / sal_frames;
    }

    if (stats) {
        stats->frames_total = n;
        stats->frames_missing_saliency = missing;
    }
    return fv;
}

FeatureVector combine_sessions(const std::vector<FeatureVector>& vectors) {
    if (vectors.empty()) throw std::invalid_argument("no session vectors");
    const double n = double(vectors.size());
    FeatureVector out;
    std::array<int, 3> region_votes{0, 0, 0};
    for (const auto& v : vectors) {
        out.f1_visibility_frames += v.f1_visibility_frames / n;
        out.f3_center_distance += v.f3_center_distance / n;
        out.f4_mean_area += v.f4_mean_area / n;
        out.f5_top10_area += v.f5_top10_area / n;
        out.f6_mean_saliency += v.f6_mean_saliency / n;
        out.f7_saliency_ratio += v.f7_saliency_ratio / n;
        const int code = std::clamp(int(std::lround(v.f2_region_code)), 0, 2);
        region_votes[code] += 1;
    }
    int best = -1;
    bool tie = false;
    for (int r = 0; r < 3; ++r) {
        if (best < 0 || region_votes[r] > region_votes[best]) {
            best = r;
            tie = false;
        } else if (region_votes[r] == region_votes[best]) {
            tie = true;
        }
    }
    if (tie) best = 1;  // tied mode resolves toward Center
    out.f2_region_code = double(best);
    return out;
}

DatasetSplit build_dataset(const std::vector<SignificanceCategory>& labels,
                           int train_size, int test_size, std::uint64_t seed) {
    const int n = int(labels.size());
    if (train_size < 0 || test_size < 0 || train_size + test_size != n)
        throw std::invalid_argument("split sizes must partition the dataset");

    std::array<std::vector<int>, 3> strata;
    for (int i = 0; i < n; ++i) strata[int(labels[i])].push_back(i);

    Rng rng(seed);
    for (auto& s : strata) rng.shuffle(s);

    // per-stratum test allocation: proportional floor, remainders by the
    // largest fractional part (ties toward the lower class index)
    std::array<int, 3> take{0, 0, 0};
    std::array<double, 3> frac{0.0, 0.0, 0.0};
    int assigned = 0;
    for (int c = 0; c < 3; ++c) {
        const double exact = n > 0 ? double(test_size) * strata[c].size() / double(n) : 0.0;
        take[c] = int(std::floor(exact));
        take[c] = std::min<int>(take[c], int(strata[c].size()));
        frac[c] = exact - std::floor(exact);
        assigned += take[c];
    }
    while (assigned < test_size) {
        int best = -1;
        for (int c = 0; c < 3; ++c) {
            if (take[c] >= int(strata[c].size())) continue;
            if (best < 0 || frac[c] > frac[best]) best = c;
        }
        if (best < 0) break;
        take[best] += 1;
        frac[best] = -1.0;
        assigned += 1;
    }

    DatasetSplit out;
    for (int c = 0; c < 3; ++c) {
        for (int i = 0; i < int(strata[c].size()); ++i) {
            if (i < take[c])
                out.test_indices.push_back(strata[c][i]);
            else
                out.train_indices.push_back(strata[c][i]);
        }
    }
    std::sort(out.train_indices.begin(), out.train_indices.end());
    std::sort(out.test_indices.begin(), out.test_indices.end());
    return out;
}

}  // namespace bbsig
