#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace bbsig {

struct ForestConfig {
    int n_trees = 100;
    int max_depth = 2;
    int features_per_split = 3;  // ceil(sqrt(7))
    bool bootstrap = true;
    std::uint64_t seed = 42;

    friend bool operator==(const ForestConfig&, const ForestConfig&) = default;
};

/// Binary CART node. Internal nodes route x[feature] <= threshold to the
/// left child; every node keeps its training class counts.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::vector<double> class_counts;

    bool is_leaf() const { return left < 0; }
};

struct DecisionTree {
    std::vector<TreeNode> nodes;

    int leaf_for(const std::vector<double>& x) const;
    int max_leaf_depth() const;
};

class Forest {
public:
    Forest() = default;
    Forest(ForestConfig cfg, int n_classes, int n_features, std::vector<DecisionTree> trees)
        : cfg_(cfg), n_classes_(n_classes), n_features_(n_features), trees_(std::move(trees)) {}

    int predict(const std::vector<double>& x) const;
    std::vector<double> predict_proba(const std::vector<double>& x) const;

    const ForestConfig& config() const { return cfg_; }
    int n_classes() const { return n_classes_; }
    int n_features() const { return n_features_; }
    const std::vector<DecisionTree>& trees() const { return trees_; }

    /// Versioned JSON model document.
    void save(std::ostream& out) const;
    static Forest load(std::istream& in);

private:
    ForestConfig cfg_;
    int n_classes_ = 0;
    int n_features_ = 0;
    std::vector<DecisionTree> trees_;
};

/// Grows a random forest of Gini-split CART trees on bootstrap resamples.
/// Deterministic given cfg.seed; training rows are canonically ordered
/// internally, so predictions do not depend on row input order.
Forest train_forest(const std::vector<std::vector<double>>& X,
                    const std::vector<int>& y, const ForestConfig& cfg);

struct CrossValidationResult {
    ForestConfig best;
    std::vector<std::pair<ForestConfig, double>> mean_accuracy;
};

/// Stratified k-fold grid search; ties go to the simpler config
/// (fewer trees, then smaller depth).
CrossValidationResult cross_validate(const std::vector<std::vector<double>>& X,
                                     const std::vector<int>& y,
                                     const std::vector<ForestConfig>& grid,
                                     int k = 5, std::uint64_t fold_seed = 7);

/// rows = true class, columns = predicted class, order (None, Short, Long).
std::array<std::array<int, 3>, 3> confusion_matrix(const std::vector<int>& y_true,
                                                   const std::vector<int>& y_pred);

/// Mean-decrease-in-impurity importances, normalized to sum 1 (all zero
/// when no tree contains a split).
std::vector<double> mdi_importance(const Forest& forest);

/// Mean accuracy drop over `repeats` seeded shuffles of each feature column.
std::vector<double> permutation_importance(const Forest& forest,
                                           const std::vector<std::vector<double>>& X,
                                           const std::vector<int>& y,
                                           int repeats = 20, std::uint64_t seed = 99);

}  // namespace bbsig
