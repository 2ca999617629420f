#include "bbsig/hungarian.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace bbsig {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Kuhn-Munkres with potentials on an n x m cost matrix, n <= m.
// Returns column assigned to each row.
std::vector<int> min_cost_rows(const std::vector<std::vector<double>>& a) {
    const int n = int(a.size());
    const int m = int(a[0].size());
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<int> p(m + 1, 0), way(m + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(m + 1, kInf);
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = 0;
            double delta = kInf;
            for (int j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = a[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> ans(n, -1);
    for (int j = 1; j <= m; ++j)
        if (p[j] > 0) ans[p[j] - 1] = j - 1;
    return ans;
}

}  // namespace

std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& score) {
    const int rows = int(score.size());
    if (rows == 0) return {};
    const int cols = int(score[0].size());
    if (cols == 0) return std::vector<int>(rows, -1);

    // Pad to square; forbidden and padding cells carry cost 0 and eligible
    // pairs carry -weight, so the minimum-cost perfect matching on the
    // padded matrix realizes the maximum total weight over partial
    // matchings (leaving a row unassigned is always available at cost 0).
    const int n = std::max(rows, cols);
    std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            if (score[i][j] >= 0.0) cost[i][j] = -score[i][j];

    const auto assign = min_cost_rows(cost);
    std::vector<int> out(rows, -1);
    for (int i = 0; i < rows; ++i) {
        const int j = assign[i];
        if (j >= 0 && j < cols && score[i][j] >= 0.0) out[i] = j;
    }
    return out;
}

Association associate(const std::vector<BoundingBox>& tracks,
                      const std::vector<BoundingBox>& detections,
                      double iou_threshold) {
    const int nt = int(tracks.size());
    const int nd = int(detections.size());

    // Canonical detection order, so tie-breaking is independent of the
    // caller's detection ordering.
    std::vector<int> rank(nd);
    {
        std::vector<int> order(nd);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            const auto& ba = detections[a];
            const auto& bb = detections[b];
            return std::tie(ba.x, ba.y, ba.w, ba.h) < std::tie(bb.x, bb.y, bb.w, bb.h);
        });
        for (int r = 0; r < nd; ++r) rank[order[r]] = r;
    }

    std::vector<std::vector<double>> score(nt, std::vector<double>(nd, -1.0));
    const double denom = double(nt + 1) * double(nd + 1);
    for (int i = 0; i < nt; ++i) {
        for (int j = 0; j < nd; ++j) {
            const double v = iou(tracks[i], detections[j]);
            if (v < iou_threshold) continue;
            // infinitesimal preference for low (track, canonical detection)
            const double pref = (double(nt - i) * (nd + 1) + double(nd - rank[j])) / denom;
            score[i][j] = v + 1e-9 * pref;
        }
    }

    Association out;
    const auto assign = nt > 0 ? max_weight_assignment(score) : std::vector<int>{};
    std::vector<char> det_used(nd, 0);
    for (int i = 0; i < nt; ++i) {
        const int j = i < int(assign.size()) ? assign[i] : -1;
        if (j >= 0) {
            out.matches.emplace_back(i, j);
            det_used[j] = 1;
        } else {
            out.unmatched_tracks.push_back(i);
        }
    }
    for (int j = 0; j < nd; ++j)
        if (!det_used[j]) out.unmatched_detections.push_back(j);
    return out;
}

}  // namespace bbsig
