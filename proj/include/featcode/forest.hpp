#pragma once

#include <cstdint>
#include <vector>

#include "featcode/feature_table.hpp"

namespace featcode {

enum class SplitCriterion { gini, entropy };

/// CART-style tree grown to purity (or < 2 samples). Internal nodes route
/// value <= threshold to the left child.
struct DecisionTree {
    struct Node {
        int feature = -1;  // -1 marks a leaf
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        std::vector<std::int64_t> histogram;  // class counts at this node
    };
    std::vector<Node> nodes;

    /// Leaf majority class, ties toward the lower index.
    int predict(const double* row) const;
    const std::vector<std::int64_t>& leaf_histogram(const double* row) const;
};

struct ForestConfig {
    int n_estimators = 100;
    SplitCriterion criterion = SplitCriterion::gini;
    bool bootstrap = true;
    int max_features = 0;  // 0 = ceil(sqrt(d))
    std::uint64_t seed = 0;
    int threads = 0;
};

struct ForestModel {
    ForestConfig config;
    int n_classes = 0;
    std::vector<DecisionTree> trees;

    /// Majority vote over trees, ties toward the lower class index.
    int predict(const double* row) const;
    std::vector<int> predict_rows(const FeatureTable& table,
                                  const std::vector<std::size_t>& rows) const;
};

/// Fits each tree on a bootstrap resample (same size, with replacement)
/// with per-split feature subsampling. The per-tree seed is seed +
/// tree_index, so results are independent of the thread schedule.
ForestModel train_random_forest(const FeatureTable& table,
                                const std::vector<std::size_t>& train_rows,
                                const ForestConfig& config);

/// Impurity helpers, exposed for tests.
double gini_impurity(const std::vector<std::int64_t>& histogram);
double entropy_impurity(const std::vector<std::int64_t>& histogram);

void save_forest(const ForestModel& model, const std::string& path);
ForestModel load_forest(const std::string& path);

}  // namespace featcode
