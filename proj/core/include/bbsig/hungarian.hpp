#pragma once

#include <utility>
#include <vector>

#include "bbsig/geometry.hpp"

namespace bbsig {

/// Maximum-total-weight one-to-one assignment. score[i][j] is the weight of
/// pairing row i with column j; entries < 0 mark forbidden pairs. Returns
/// per-row column index, -1 for unassigned rows. Rows/columns left over when
/// the matrix is rectangular stay unassigned.
std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& score);

struct Association {
    std::vector<std::pair<int, int>> matches;  // (track index, detection index)
    std::vector<int> unmatched_tracks;
    std::vector<int> unmatched_detections;
};

/// IoU-gated Hungarian association between predicted track boxes and
/// detections. Pairs with IoU < iou_threshold are never matched. Ties in
/// total IoU are broken toward earlier tracks and canonically ordered
/// (box-sorted) detections, so the matched (track, box) pairs depend only
/// on the IoU matrix, not on detection input order.
Association associate(const std::vector<BoundingBox>& tracks,
                      const std::vector<BoundingBox>& detections,
                      double iou_threshold);

}  // namespace bbsig
