#include "bbsig/hota.hpp"

#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "bbsig/geometry.hpp"
#include "bbsig/hungarian.hpp"

namespace bbsig {

std::vector<double> hota_alphas() {
    std::vector<double> a;
    for (int k = 1; k <= 19; ++k) a.push_back(0.05 * k);
    return a;
}

namespace {

struct FramePairs {
    std::vector<int> gt_ids;
    std::vector<int> pred_ids;
    std::vector<std::vector<double>> iou;  // gt x pred
};

struct SequenceData {
    std::vector<FramePairs> frames;
    std::unordered_map<int, long long> gt_count;
    std::unordered_map<int, long long> pred_count;
    long long gt_total = 0;
    long long pred_total = 0;
};

void check_side(const DetectionMap& dets, const char* side) {
    for (const auto& [frame, v] : dets) {
        std::set<int> seen;
        for (const auto& d : v) {
            if (d.id < 0)
                throw std::invalid_argument(std::string(side) + ": negative track id");
            if (!seen.insert(d.id).second)
                throw std::invalid_argument(std::string(side) + ": duplicate (frame,id) at frame " +
                                            std::to_string(frame));
        }
    }
}

SequenceData prepare(const DetectionMap& gt, const DetectionMap& pred) {
    check_side(gt, "gt");
    check_side(pred, "pred");
    SequenceData s;
    std::set<int> frames;
    for (const auto& [f, v] : gt) frames.insert(f);
    for (const auto& [f, v] : pred) frames.insert(f);
    static const std::vector<FrameDetection> kEmpty;
    for (int f : frames) {
        const auto git = gt.find(f);
        const auto pit = pred.find(f);
        const auto& gv = git == gt.end() ? kEmpty : git->second;
        const auto& pv = pit == pred.end() ? kEmpty : pit->second;
        FramePairs fp;
        for (const auto& d : gv) {
            fp.gt_ids.push_back(d.id);
            s.gt_count[d.id] += 1;
        }
        for (const auto& d : pv) {
            fp.pred_ids.push_back(d.id);
            s.pred_count[d.id] += 1;
        }
        fp.iou.assign(gv.size(), std::vector<double>(pv.size(), 0.0));
        for (std::size_t i = 0; i < gv.size(); ++i)
            for (std::size_t j = 0; j < pv.size(); ++j)
                fp.iou[i][j] = iou(gv[i].box, pv[j].box);
        s.gt_total += (long long)gv.size();
        s.pred_total += (long long)pv.size();
        s.frames.push_back(std::move(fp));
    }
    return s;
}

struct AlphaTally {
    long long tp = 0;
    long long fn = 0;
    long long fp = 0;
    double sum_a = 0.0;
    double sum_ass_pr = 0.0;
    double sum_ass_re = 0.0;
    double sum_loc = 0.0;
    long long gt_total = 0;
    long long pred_total = 0;
};

void tally_sequence(const SequenceData& s, double alpha, AlphaTally& t) {
    // pass 1: potential match counts per (gt id, pred id)
    std::map<std::pair<int, int>, long long> potential;
    for (const auto& fp : s.frames)
        for (std::size_t i = 0; i < fp.gt_ids.size(); ++i)
            for (std::size_t j = 0; j < fp.pred_ids.size(); ++j)
                if (fp.iou[i][j] >= alpha)
                    potential[{fp.gt_ids[i], fp.pred_ids[j]}] += 1;

    // pass 2: per-frame Hungarian on the optimistic association score,
    // IoU tie-break with weight 1e-6
    std::map<std::pair<int, int>, long long> tpa;
    std::vector<std::pair<std::pair<int, int>, double>> tps;  // ((g,p), iou)
    for (const auto& fp : s.frames) {
        const int ng = int(fp.gt_ids.size());
        const int np = int(fp.pred_ids.size());
        if (ng == 0 || np == 0) continue;
        std::vector<std::vector<double>> score(ng, std::vector<double>(np, -1.0));
        for (int i = 0; i < ng; ++i) {
            for (int j = 0; j < np; ++j) {
                if (fp.iou[i][j] < alpha) continue;
                const auto key = std::make_pair(fp.gt_ids[i], fp.pred_ids[j]);
                const double n = double(potential.at(key));
                const double opt =
                    n / (double(s.gt_count.at(key.first)) + double(s.pred_count.at(key.second)) - n);
                score[i][j] = opt + 1e-6 * fp.iou[i][j];
            }
        }
        const auto assign = max_weight_assignment(score);
        for (int i = 0; i < ng; ++i) {
            const int j = assign[i];
            if (j < 0) continue;
            const auto key = std::make_pair(fp.gt_ids[i], fp.pred_ids[j]);
            tpa[key] += 1;
            tps.emplace_back(key, fp.iou[i][j]);
        }
    }

    const long long tp = (long long)tps.size();
    t.tp += tp;
    t.fn += s.gt_total - tp;
    t.fp += s.pred_total - tp;
    t.gt_total += s.gt_total;
    t.pred_total += s.pred_total;
    for (const auto& [key, loc] : tps) {
        const double a = double(tpa.at(key));
        const double gc = double(s.gt_count.at(key.first));
        const double pc = double(s.pred_count.at(key.second));
        t.sum_a += a / (gc + pc - a);
        t.sum_ass_pr += a / pc;  // TPA / (TPA + FPA)
        t.sum_ass_re += a / gc;  // TPA / (TPA + FNA)
        t.sum_loc += loc;
    }
}

}  // namespace

HotaResult evaluate_hota_multi(
    const std::vector<std::pair<DetectionMap, DetectionMap>>& sequences) {
    if (sequences.empty()) throw std::invalid_argument("no sequences to evaluate");

    std::vector<SequenceData> data;
    data.reserve(sequences.size());
    for (const auto& [gt, pred] : sequences) data.push_back(prepare(gt, pred));

    HotaResult res;
    const auto alphas = hota_alphas();
    for (double alpha : alphas) {
        AlphaTally t;
        for (const auto& s : data) tally_sequence(s, alpha, t);

        const bool both_empty = t.gt_total == 0 && t.pred_total == 0;
        auto ratio = [&](double num, double den) {
            if (den > 0.0) return num / den;
            return both_empty ? 1.0 : 0.0;
        };

        HotaAlphaRecord r;
        r.alpha = alpha;
        r.tp = t.tp;
        r.fn = t.fn;
        r.fp = t.fp;
        r.det_a = ratio(double(t.tp), double(t.tp + t.fn + t.fp));
        r.det_pr = ratio(double(t.tp), double(t.tp + t.fp));
        r.det_re = ratio(double(t.tp), double(t.tp + t.fn));
        r.ass_a = ratio(t.sum_a, double(t.tp));
        r.ass_pr = ratio(t.sum_ass_pr, double(t.tp));
        r.ass_re = ratio(t.sum_ass_re, double(t.tp));
        r.loc_a = ratio(t.sum_loc, double(t.tp));
        r.hota = std::sqrt(r.det_a * r.ass_a);
        res.per_alpha.push_back(r);
    }

    // sum first, divide once: the mean of nineteen exact 1.0 values must
    // come out as exactly 1.0
    const double n = double(res.per_alpha.size());
    for (const auto& r : res.per_alpha) {
        res.hota += r.hota;
        res.det_a += r.det_a;
        res.det_pr += r.det_pr;
        res.det_re += r.det_re;
        res.ass_a += r.ass_a;
        res.ass_pr += r.ass_pr;
        res.ass_re += r.ass_re;
        res.loc_a += r.loc_a;
    }
    res.hota /= n;
    res.det_a /= n;
    res.det_pr /= n;
    res.det_re /= n;
    res.ass_a /= n;
    res.ass_pr /= n;
    res.ass_re /= n;
    res.loc_a /= n;
    return res;
}

HotaResult evaluate_hota(const DetectionMap& gt, const DetectionMap& pred) {
    return evaluate_hota_multi({{gt, pred}});
}

}  // namespace bbsig
