#include "bbsig/saliency.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace bbsig {

namespace {

std::size_t pixel_index(const SaliencyGrid& map, const GazePoint& p) {
    const int x = std::clamp(int(std::lround(p.x)), 0, map.dims.width - 1);
    const int y = std::clamp(int(std::lround(p.y)), 0, map.dims.height - 1);
    return std::size_t(y) * map.dims.width + x;
}

void check_same_dims(const SaliencyGrid& a, const SaliencyGrid& b) {
    if (a.dims != b.dims) throw std::invalid_argument("grid dimensions differ");
}

}  // namespace

double auc_judd(const SaliencyGrid& map, const FixationSet& fix) {
    if (fix.points.empty()) throw std::invalid_argument("no fixations");
    if (map.values.empty()) throw std::invalid_argument("empty map");

    std::set<std::size_t> fix_pixels;
    for (const auto& p : fix.points) fix_pixels.insert(pixel_index(map, p));

    std::vector<double> fix_vals;
    fix_vals.reserve(fix_pixels.size());
    for (std::size_t i : fix_pixels) fix_vals.push_back(double(map.values[i]));

    // non-fixated pixel values
    std::vector<double> bg;
    bg.reserve(map.values.size() - fix_pixels.size());
    for (std::size_t i = 0; i < map.values.size(); ++i)
        if (!fix_pixels.count(i)) bg.push_back(double(map.values[i]));

    std::vector<double> thresholds(fix_vals);
    std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    std::sort(fix_vals.begin(), fix_vals.end());
    std::sort(bg.begin(), bg.end());

    const double nf = double(fix_vals.size());
    const double nb = double(bg.size());

    // curve points (FPR, TPR) at each threshold, counting values >= t
    std::vector<std::pair<double, double>> curve{{0.0, 0.0}};
    for (double t : thresholds) {
        const double tp =
            double(fix_vals.end() - std::lower_bound(fix_vals.begin(), fix_vals.end(), t));
        const double fp = double(bg.end() - std::lower_bound(bg.begin(), bg.end(), t));
        curve.emplace_back(nb > 0.0 ? fp / nb : 0.0, tp / nf);
    }
    curve.emplace_back(1.0, 1.0);

    double area = 0.0;
    for (std::size_t i = 1; i < curve.size(); ++i)
        area += 0.5 * (curve[i].first - curve[i - 1].first) *
                (curve[i].second + curve[i - 1].second);
    return area;
}

double nss(const SaliencyGrid& map, const FixationSet& fix) {
    if (fix.points.empty()) throw std::invalid_argument("no fixations");
    const double n = double(map.values.size());
    double mean = 0.0;
    for (auto v : map.values) mean += v;
    mean /= n;
    double var = 0.0;
    for (auto v : map.values) var += (v - mean) * (v - mean);
    var /= n;
    if (var <= 0.0) return 0.0;
    const double sd = std::sqrt(var);

    double z = 0.0;
    for (const auto& p : fix.points)
        z += (double(map.values[pixel_index(map, p)]) - mean) / sd;
    return z / double(fix.points.size());
}

double sim(const SaliencyGrid& map, const SaliencyGrid& gt_density) {
    check_same_dims(map, gt_density);
    double sa = 0.0, sb = 0.0;
    for (auto v : map.values) sa += v;
    for (auto v : gt_density.values) sb += v;
    if (sa <= 0.0 || sb <= 0.0) throw std::invalid_argument("all-zero grid");
    double s = 0.0;
    for (std::size_t i = 0; i < map.values.size(); ++i)
        s += std::min(double(map.values[i]) / sa, double(gt_density.values[i]) / sb);
    return s;
}

double cc(const SaliencyGrid& map, const SaliencyGrid& gt_density) {
    check_same_dims(map, gt_density);
    const double n = double(map.values.size());
    double ma = 0.0, mb = 0.0;
    for (auto v : map.values) ma += v;
    for (auto v : gt_density.values) mb += v;
    ma /= n;
    mb /= n;
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < map.values.size(); ++i) {
        const double da = double(map.values[i]) - ma;
        const double db = double(gt_density.values[i]) - mb;
        cov += da * db;
        va += da * da;
        vb += db * db;
    }
    if (va <= 0.0 || vb <= 0.0) throw std::invalid_argument("zero-variance grid");
    return cov / std::sqrt(va * vb);
}

SaliencyGrid fixation_density(const FixationSet& fix, const ImageDims& dims,
                              double sigma) {
    if (fix.points.empty()) throw std::invalid_argument("no fixations");
    if (sigma <= 0.0) throw std::invalid_argument("sigma must be positive");
    std::vector<double> acc(std::size_t(dims.width) * dims.height, 0.0);
    const double inv = 1.0 / (2.0 * sigma * sigma);
    for (const auto& p : fix.points) {
        for (int y = 0; y < dims.height; ++y) {
            const double dy = y - p.y;
            for (int x = 0; x < dims.width; ++x) {
                const double dx = x - p.x;
                acc[std::size_t(y) * dims.width + x] += std::exp(-(dx * dx + dy * dy) * inv);
            }
        }
    }
    const double peak = *std::max_element(acc.begin(), acc.end());
    SaliencyGrid g;
    g.dims = dims;
    g.values.resize(acc.size());
    for (std::size_t i = 0; i < acc.size(); ++i)
        g.values[i] = std::uint8_t(std::lround(255.0 * acc[i] / peak));
    return g;
}

}  // namespace bbsig
