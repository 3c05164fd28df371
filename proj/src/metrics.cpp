#include "featcode/metrics.hpp"

#include "featcode/errors.hpp"

namespace featcode {

Evaluation evaluate(const std::vector<int>& true_labels, const std::vector<int>& predicted_labels,
                    const std::vector<std::string>& class_names) {
    if (true_labels.size() != predicted_labels.size())
        throw ValueError("label lists differ in length");
    const std::size_t k = class_names.size();

    Evaluation result;
    result.confusion.class_names = class_names;
    result.confusion.counts.assign(k * k, 0);
    for (std::size_t i = 0; i < true_labels.size(); ++i) {
        const int t = true_labels[i];
        const int p = predicted_labels[i];
        if (t < 0 || static_cast<std::size_t>(t) >= k || p < 0 || static_cast<std::size_t>(p) >= k)
            throw ValueError("label outside [0, k) at position " + std::to_string(i));
        result.confusion.counts[static_cast<std::size_t>(t) * k + static_cast<std::size_t>(p)]++;
    }

    const std::int64_t total = result.confusion.total();
    result.accuracy =
        total > 0 ? static_cast<double>(result.confusion.trace()) / static_cast<double>(total) : 0.0;

    result.per_class_f1.assign(k, 0.0);
    result.absent.assign(k, false);
    double f1_sum = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        std::int64_t tp = result.confusion.at(c, c);
        std::int64_t actual = 0, predicted = 0;
        for (std::size_t j = 0; j < k; ++j) {
            actual += result.confusion.at(c, j);
            predicted += result.confusion.at(j, c);
        }
        if (actual == 0 && predicted == 0) {
            result.absent[c] = true;  // contributes F1 = 0 to the macro mean
        } else if (tp > 0) {
            const double precision = static_cast<double>(tp) / static_cast<double>(predicted);
            const double recall = static_cast<double>(tp) / static_cast<double>(actual);
            result.per_class_f1[c] = 2.0 * precision * recall / (precision + recall);
        }
        f1_sum += result.per_class_f1[c];
    }
    result.macro_f1 = k > 0 ? f1_sum / static_cast<double>(k) : 0.0;
    return result;
}

GridResult grid_search(const GridSpec& spec,
                       const std::function<double(const GridConfig&)>& trainer) {
    if (spec.axes.empty()) throw Error("grid has no axes");
    std::size_t total = 1;
    for (const GridAxis& axis : spec.axes) {
        if (axis.values.empty()) throw Error("grid axis '" + axis.name + "' is empty");
        total *= axis.values.size();
    }

    GridResult result;
    std::vector<std::size_t> odometer(spec.axes.size(), 0);
    bool any_succeeded = false;
    double best_metric = 0.0;

    for (std::size_t cell_index = 0; cell_index < total; ++cell_index) {
        GridCell cell;
        for (std::size_t a = 0; a < spec.axes.size(); ++a) {
            cell.config[spec.axes[a].name] = spec.axes[a].values[odometer[a]];
        }
        try {
            cell.selection_metric = trainer(cell.config);
            if (!any_succeeded || cell.selection_metric > best_metric) {
                any_succeeded = true;
                best_metric = cell.selection_metric;
                result.best = cell.config;
                result.best_index = cell_index;
            }
        } catch (const std::exception& e) {
            cell.failed = true;
            cell.error = e.what();
        }
        result.cells.push_back(std::move(cell));

        // odometer: last axis varies fastest
        for (std::size_t a = spec.axes.size(); a-- > 0;) {
            if (++odometer[a] < spec.axes[a].values.size()) break;
            odometer[a] = 0;
        }
    }
    if (!any_succeeded) throw Error("every grid cell failed");
    return result;
}

}  // namespace featcode
