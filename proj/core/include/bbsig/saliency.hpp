#pragma once

#include <vector>

#include "bbsig/geometry.hpp"
#include "bbsig/io.hpp"

namespace bbsig {

struct FixationSet {
    std::vector<GazePoint> points;
};

struct SaliencyScore {
    double auc_judd = 0.0;
    double nss = 0.0;
    double sim = 0.0;
    double cc = 0.0;
};

/// AUC-Judd: ROC area with thresholds at the saliency values of fixated
/// pixels; true-positive rate over fixations, false-positive rate over the
/// non-fixated pixels. Invariant under strictly increasing transforms of
/// the map. Constant maps score 0.5.
double auc_judd(const SaliencyGrid& map, const FixationSet& fix);

/// Mean z-scored map value at fixation pixels; 0 for zero-variance maps.
double nss(const SaliencyGrid& map, const FixationSet& fix);

/// Histogram intersection of the two sum-normalized grids.
double sim(const SaliencyGrid& map, const SaliencyGrid& gt_density);

/// Pearson correlation over pixels.
double cc(const SaliencyGrid& map, const SaliencyGrid& gt_density);

/// Sum of isotropic Gaussian kernels at the fixations, rescaled so the
/// maximum maps to 255.
SaliencyGrid fixation_density(const FixationSet& fix, const ImageDims& dims,
                              double sigma);

}  // namespace bbsig
