#pragma once

#include <vector>

#include "bbsig/io.hpp"

namespace bbsig {

struct HotaAlphaRecord {
    double alpha = 0.0;
    long long tp = 0;
    long long fn = 0;
    long long fp = 0;
    double det_a = 0.0;
    double det_pr = 0.0;
    double det_re = 0.0;
    double ass_a = 0.0;
    double ass_pr = 0.0;
    double ass_re = 0.0;
    double loc_a = 0.0;
    double hota = 0.0;
};

/// HOTA decomposition: per-alpha records plus the alpha-averaged scalars.
/// All values are ratios in [0,1]; reports scale them by 100.
struct HotaResult {
    std::vector<HotaAlphaRecord> per_alpha;
    double hota = 0.0;
    double det_a = 0.0;
    double det_pr = 0.0;
    double det_re = 0.0;
    double ass_a = 0.0;
    double ass_pr = 0.0;
    double ass_re = 0.0;
    double loc_a = 0.0;
};

/// The 19 localization thresholds 0.05, 0.10, ..., 0.95.
std::vector<double> hota_alphas();

/// Evaluates HOTA between ground-truth and predicted track files.
/// Requires ids >= 0 and at most one record per (frame, id) on each side.
HotaResult evaluate_hota(const DetectionMap& gt, const DetectionMap& pred);

/// Dataset-level HOTA: counts are pooled across sequences before any
/// ratio is formed, per alpha.
HotaResult evaluate_hota_multi(
    const std::vector<std::pair<DetectionMap, DetectionMap>>& sequences);

}  // namespace bbsig
