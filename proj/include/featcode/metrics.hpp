#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace featcode {

/// k x k counts; rows index the true class, columns the predicted class.
struct ConfusionMatrix {
    std::vector<std::string> class_names;
    std::vector<std::int64_t> counts;  // row-major

    std::size_t k() const { return class_names.size(); }
    std::int64_t at(std::size_t true_class, std::size_t predicted) const {
        return counts[true_class * k() + predicted];
    }
    std::int64_t total() const {
        std::int64_t t = 0;
        for (const std::int64_t c : counts) t += c;
        return t;
    }
    std::int64_t trace() const {
        std::int64_t t = 0;
        for (std::size_t i = 0; i < k(); ++i) t += at(i, i);
        return t;
    }
};

struct Evaluation {
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    ConfusionMatrix confusion;
    std::vector<double> per_class_f1;
    std::vector<bool> absent;  // class missing from both truth and prediction
};

/// Accuracy, macro F1 (absent classes contribute 0 and are flagged), and
/// the confusion matrix. Throws ValueError on length mismatch or labels
/// outside [0, k).
Evaluation evaluate(const std::vector<int>& true_labels, const std::vector<int>& predicted_labels,
                    const std::vector<std::string>& class_names);

/*---- grid search ----*/

using GridConfig = std::map<std::string, std::string>;

struct GridAxis {
    std::string name;
    std::vector<std::string> values;
};

struct GridSpec {
    std::vector<GridAxis> axes;  // first axis varies slowest
};

struct GridCell {
    GridConfig config;
    double selection_metric = 0.0;  // validation accuracy (test accuracy when flagged)
    bool failed = false;
    std::string error;
};

struct GridResult {
    GridConfig best;
    std::size_t best_index = 0;
    std::vector<GridCell> cells;
};

/// Evaluates the full Cartesian product in deterministic axis order. The
/// trainer returns the cell's selection metric; a throwing trainer marks
/// the cell failed and the search continues. Throws Error when every cell
/// fails or the spec has an empty axis.
GridResult grid_search(const GridSpec& spec,
                       const std::function<double(const GridConfig&)>& trainer);

}  // namespace featcode
