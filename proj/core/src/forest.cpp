#include "bbsig/forest.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "bbsig/rng.hpp"

namespace bbsig {

namespace {

double gini(const std::vector<double>& counts, double total) {
    if (total <= 0.0) return 0.0;
    double g = 1.0;
    for (double c : counts) {
        const double p = c / total;
        g -= p * p;
    }
    return g;
}

struct TreeBuilder {
    const std::vector<std::vector<double>>& X;
    const std::vector<int>& y;
    int n_classes;
    int n_features;
    int max_depth;
    int features_per_split;
    Rng& rng;
    DecisionTree tree;

    std::vector<double> counts_of(const std::vector<int>& idx) const {
        std::vector<double> c(std::size_t(n_classes), 0.0);
        for (int i : idx) c[std::size_t(y[i])] += 1.0;
        return c;
    }

    int build(const std::vector<int>& idx, int depth) {
        const int node_id = int(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes[node_id].class_counts = counts_of(idx);

        const auto& counts = tree.nodes[node_id].class_counts;
        const double total = double(idx.size());
        const double imp = gini(counts, total);
        if (depth >= max_depth || idx.size() < 2 || imp <= 0.0) return node_id;

        // candidate features for this node, evaluated in ascending order
        std::vector<int> feats(static_cast<std::size_t>(n_features));
        std::iota(feats.begin(), feats.end(), 0);
        for (int i = 0; i < features_per_split && i < n_features; ++i) {
            const int j = i + int(rng.uniform_int(std::uint64_t(n_features - i)));
            std::swap(feats[std::size_t(i)], feats[std::size_t(j)]);
        }
        feats.resize(std::size_t(std::min(features_per_split, n_features)));
        std::sort(feats.begin(), feats.end());

        int best_feature = -1;
        double best_threshold = 0.0;
        double best_gain = 1e-12;
        for (int f : feats) {
            std::vector<std::pair<double, int>> vals;
            vals.reserve(idx.size());
            for (int i : idx) vals.emplace_back(X[std::size_t(i)][std::size_t(f)], y[i]);
            std::sort(vals.begin(), vals.end());

            std::vector<double> left(std::size_t(n_classes), 0.0);
            std::vector<double> right = counts;
            for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
                left[std::size_t(vals[k].second)] += 1.0;
                right[std::size_t(vals[k].second)] -= 1.0;
                if (vals[k].first == vals[k + 1].first) continue;
                const double nl = double(k + 1);
                const double nr = total - nl;
                const double gain =
                    imp - (nl * gini(left, nl) + nr * gini(right, nr)) / total;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = f;
                    best_threshold = 0.5 * (vals[k].first + vals[k + 1].first);
                }
            }
        }
        if (best_feature < 0) return node_id;

        std::vector<int> li, ri;
        for (int i : idx) {
            if (X[std::size_t(i)][std::size_t(best_feature)] <= best_threshold)
                li.push_back(i);
            else
                ri.push_back(i);
        }
        if (li.empty() || ri.empty()) return node_id;

        const int l = build(li, depth + 1);
        const int r = build(ri, depth + 1);
        tree.nodes[node_id].feature = best_feature;
        tree.nodes[node_id].threshold = best_threshold;
        tree.nodes[node_id].left = l;
        tree.nodes[node_id].right = r;
        return node_id;
    }
};

void check_matrix(const std::vector<std::vector<double>>& X, const std::vector<int>& y) {
    if (X.empty() || X.size() != y.size())
        throw std::invalid_argument("empty or mismatched training data");
    const std::size_t nf = X.front().size();
    if (nf == 0) throw std::invalid_argument("rows must have at least one feature");
    for (const auto& row : X) {
        if (row.size() != nf) throw std::invalid_argument("ragged feature matrix");
        for (double v : row)
            if (!std::isfinite(v)) throw std::invalid_argument("non-finite feature value");
    }
    for (int c : y)
        if (c < 0) throw std::invalid_argument("negative class label");
}

}  // namespace

int DecisionTree::leaf_for(const std::vector<double>& x) const {
    int n = 0;
    while (!nodes[std::size_t(n)].is_leaf()) {
        const auto& nd = nodes[std::size_t(n)];
        n = x[std::size_t(nd.feature)] <= nd.threshold ? nd.left : nd.right;
    }
    return n;
}

int DecisionTree::max_leaf_depth() const {
    if (nodes.empty()) return 0;
    int best = 0;
    // depth-first walk carrying depth
    std::vector<std::pair<int, int>> stack{{0, 0}};
    while (!stack.empty()) {
        const auto [n, d] = stack.back();
        stack.pop_back();
        const auto& nd = nodes[std::size_t(n)];
        if (nd.is_leaf()) {
            best = std::max(best, d);
        } else {
            stack.push_back({nd.left, d + 1});
            stack.push_back({nd.right, d + 1});
        }
    }
    return best;
}

int Forest::predict(const std::vector<double>& x) const {
    if (int(x.size()) != n_features_) throw std::invalid_argument("feature count mismatch");
    for (double v : x)
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite feature value");
    std::vector<int> votes(std::size_t(n_classes_), 0);
    for (const auto& t : trees_) {
        const auto& counts = t.nodes[std::size_t(t.leaf_for(x))].class_counts;
        int cls = 0;
        for (int c = 1; c < n_classes_; ++c)
            if (counts[std::size_t(c)] > counts[std::size_t(cls)]) cls = c;
        votes[std::size_t(cls)] += 1;
    }
    int out = 0;
    for (int c = 1; c < n_classes_; ++c)
        if (votes[std::size_t(c)] > votes[std::size_t(out)]) out = c;
    return out;
}

std::vector<double> Forest::predict_proba(const std::vector<double>& x) const {
    if (int(x.size()) != n_features_) throw std::invalid_argument("feature count mismatch");
    std::vector<double> p(std::size_t(n_classes_), 0.0);
    for (const auto& t : trees_) {
        const auto& counts = t.nodes[std::size_t(t.leaf_for(x))].class_counts;
        const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
        if (total <= 0.0) continue;
        for (int c = 0; c < n_classes_; ++c)
            p[std::size_t(c)] += counts[std::size_t(c)] / total / double(trees_.size());
    }
    return p;
}

Forest train_forest(const std::vector<std::vector<double>>& X,
                    const std::vector<int>& y, const ForestConfig& cfg) {
    check_matrix(X, y);
    if (cfg.n_trees < 1 || cfg.max_depth < 1 || cfg.features_per_split < 1)
        throw std::invalid_argument("invalid forest configuration");

    const int n_features = int(X.front().size());
    const int n_classes = *std::max_element(y.begin(), y.end()) + 1;

    // canonical row order: training is invariant under input permutation
    std::vector<int> order(X.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (X[std::size_t(a)] != X[std::size_t(b)]) return X[std::size_t(a)] < X[std::size_t(b)];
        return y[std::size_t(a)] < y[std::size_t(b)];
    });
    std::vector<std::vector<double>> Xs;
    std::vector<int> ys;
    Xs.reserve(X.size());
    ys.reserve(y.size());
    for (int i : order) {
        Xs.push_back(X[std::size_t(i)]);
        ys.push_back(y[std::size_t(i)]);
    }

    const Rng base(cfg.seed);
    std::vector<DecisionTree> trees;
    trees.reserve(std::size_t(cfg.n_trees));
    for (int t = 0; t < cfg.n_trees; ++t) {
        Rng rng = base.fork(std::uint64_t(t));
        std::vector<int> idx;
        idx.reserve(Xs.size());
        if (cfg.bootstrap) {
            for (std::size_t i = 0; i < Xs.size(); ++i)
                idx.push_back(int(rng.uniform_int(Xs.size())));
        } else {
            idx.resize(Xs.size());
            std::iota(idx.begin(), idx.end(), 0);
        }
        TreeBuilder b{Xs, ys, n_classes, n_features, cfg.max_depth,
                      cfg.features_per_split, rng, {}};
        b.build(idx, 0);
        trees.push_back(std::move(b.tree));
    }
    return Forest(cfg, n_classes, n_features, std::move(trees));
}

CrossValidationResult cross_validate(const std::vector<std::vector<double>>& X,
                                     const std::vector<int>& y,
                                     const std::vector<ForestConfig>& grid,
                                     int k, std::uint64_t fold_seed) {
    check_matrix(X, y);
    if (grid.empty()) throw std::invalid_argument("empty config grid");
    if (k < 2 || k > int(X.size())) throw std::invalid_argument("invalid fold count");

    // stratified fold assignment, round-robin over shuffled class members
    const int n_classes = *std::max_element(y.begin(), y.end()) + 1;
    std::vector<int> fold_of(X.size(), 0);
    Rng rng(fold_seed);
    for (int c = 0; c < n_classes; ++c) {
        std::vector<int> members;
        for (std::size_t i = 0; i < X.size(); ++i)
            if (y[i] == c) members.push_back(int(i));
        rng.shuffle(members);
        for (std::size_t j = 0; j < members.size(); ++j)
            fold_of[std::size_t(members[j])] = int(j % std::size_t(k));
    }

    CrossValidationResult out;
    for (const auto& cfg : grid) {
        double acc_sum = 0.0;
        for (int fold = 0; fold < k; ++fold) {
            std::vector<std::vector<double>> Xt, Xv;
            std::vector<int> yt, yv;
            for (std::size_t i = 0; i < X.size(); ++i) {
                if (fold_of[i] == fold) {
                    Xv.push_back(X[i]);
                    yv.push_back(y[i]);
                } else {
                    Xt.push_back(X[i]);
                    yt.push_back(y[i]);
                }
            }
            if (Xv.empty() || Xt.empty()) continue;
            const Forest f = train_forest(Xt, yt, cfg);
            int hits = 0;
            for (std::size_t i = 0; i < Xv.size(); ++i)
                if (f.predict(Xv[i]) == yv[i]) ++hits;
            acc_sum += double(hits) / double(Xv.size());
        }
        out.mean_accuracy.emplace_back(cfg, acc_sum / double(k));
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < out.mean_accuracy.size(); ++i) {
        const auto& [ci, ai] = out.mean_accuracy[i];
        const auto& [cb, ab] = out.mean_accuracy[best];
        if (ai > ab ||
            (ai == ab && std::tie(ci.n_trees, ci.max_depth) < std::tie(cb.n_trees, cb.max_depth)))
            best = i;
    }
    out.best = out.mean_accuracy[best].first;
    return out;
}

std::array<std::array<int, 3>, 3> confusion_matrix(const std::vector<int>& y_true,
                                                   const std::vector<int>& y_pred) {
    if (y_true.size() != y_pred.size())
        throw std::invalid_argument("label vectors differ in length");
    std::array<std::array<int, 3>, 3> m{};
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i] < 0 || y_true[i] > 2 || y_pred[i] < 0 || y_pred[i] > 2)
            throw std::invalid_argument("class label outside {0,1,2}");
        m[std::size_t(y_true[i])][std::size_t(y_pred[i])] += 1;
    }
    return m;
}

std::vector<double> mdi_importance(const Forest& forest) {
    std::vector<double> imp(std::size_t(forest.n_features()), 0.0);
    for (const auto& t : forest.trees()) {
        if (t.nodes.empty()) continue;
        const double n_root =
            std::accumulate(t.nodes[0].class_counts.begin(), t.nodes[0].class_counts.end(), 0.0);
        if (n_root <= 0.0) continue;
        for (const auto& nd : t.nodes) {
            if (nd.is_leaf()) continue;
            const auto& lc = t.nodes[std::size_t(nd.left)].class_counts;
            const auto& rc = t.nodes[std::size_t(nd.right)].class_counts;
            const double nn = std::accumulate(nd.class_counts.begin(), nd.class_counts.end(), 0.0);
            const double nl = std::accumulate(lc.begin(), lc.end(), 0.0);
            const double nr = std::accumulate(rc.begin(), rc.end(), 0.0);
            const double decrease =
                (nn / n_root) *
                (gini(nd.class_counts, nn) - (nl * gini(lc, nl) + nr * gini(rc, nr)) / nn);
            imp[std::size_t(nd.feature)] += decrease / double(forest.trees().size());
        }
    }
    const double total = std::accumulate(imp.begin(), imp.end(), 0.0);
    if (total > 0.0)
        for (double& v : imp) v /= total;
    return imp;
}

std::vector<double> permutation_importance(const Forest& forest,
                                           const std::vector<std::vector<double>>& X,
                                           const std::vector<int>& y,
                                           int repeats, std::uint64_t seed) {
    check_matrix(X, y);
    if (repeats < 1) throw std::invalid_argument("repeats must be >= 1");
    auto accuracy = [&](const std::vector<std::vector<double>>& M) {
        int hits = 0;
        for (std::size_t i = 0; i < M.size(); ++i)
            if (forest.predict(M[i]) == y[i]) ++hits;
        return double(hits) / double(M.size());
    };
    const double baseline = accuracy(X);

    const Rng base(seed);
    std::vector<double> imp(std::size_t(forest.n_features()), 0.0);
    for (int f = 0; f < forest.n_features(); ++f) {
        double drop_sum = 0.0;
        for (int r = 0; r < repeats; ++r) {
            Rng rng = base.fork(std::uint64_t(f) * 1000003ULL + std::uint64_t(r));
            std::vector<double> col(X.size());
            for (std::size_t i = 0; i < X.size(); ++i) col[i] = X[i][std::size_t(f)];
            rng.shuffle(col);
            std::vector<std::vector<double>> Xp = X;
            for (std::size_t i = 0; i < X.size(); ++i) Xp[i][std::size_t(f)] = col[i];
            drop_sum += baseline - accuracy(Xp);
        }
        imp[std::size_t(f)] = drop_sum / double(repeats);
    }
    return imp;
}

void Forest::save(std::ostream& out) const {
    nlohmann::ordered_json doc;
    doc["format_version"] = 1;
    doc["n_classes"] = n_classes_;
    doc["n_features"] = n_features_;
    doc["config"] = {{"n_trees", cfg_.n_trees},
                     {"max_depth", cfg_.max_depth},
                     {"features_per_split", cfg_.features_per_split},
                     {"bootstrap", cfg_.bootstrap},
                     {"seed", cfg_.seed}};
    auto& trees = doc["trees"] = nlohmann::ordered_json::array();
    for (const auto& t : trees_) {
        nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
        for (const auto& nd : t.nodes)
            nodes.push_back({nd.feature, nd.threshold, nd.left, nd.right, nd.class_counts});
        trees.push_back({{"nodes", std::move(nodes)}});
    }
    out << doc.dump(1) << '\n';
}

Forest Forest::load(std::istream& in) {
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("invalid model document: ") + e.what());
    }
    if (!doc.contains("format_version") || doc["format_version"] != 1)
        throw std::runtime_error("unsupported model format version");
    Forest f;
    f.n_classes_ = doc.at("n_classes").get<int>();
    f.n_features_ = doc.at("n_features").get<int>();
    const auto& c = doc.at("config");
    f.cfg_.n_trees = c.at("n_trees").get<int>();
    f.cfg_.max_depth = c.at("max_depth").get<int>();
    f.cfg_.features_per_split = c.at("features_per_split").get<int>();
    f.cfg_.bootstrap = c.at("bootstrap").get<bool>();
    f.cfg_.seed = c.at("seed").get<std::uint64_t>();
    for (const auto& jt : doc.at("trees")) {
        DecisionTree t;
        for (const auto& jn : jt.at("nodes")) {
            TreeNode nd;
            nd.feature = jn.at(0).get<int>();
            nd.threshold = jn.at(1).get<double>();
            nd.left = jn.at(2).get<int>();
            nd.right = jn.at(3).get<int>();
            nd.class_counts = jn.at(4).get<std::vector<double>>();
            t.nodes.push_back(std::move(nd));
        }
        f.trees_.push_back(std::move(t));
    }
    return f;
}

}  // namespace bbsig
