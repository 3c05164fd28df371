#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace featcode {

/// Labeled matrix of per-sample feature vectors. Immutable by convention
/// after construction; loaders validate the invariants below.
///
/// Invariants: values has rows()*cols() entries, labels has one entry per
/// row, every label indexes class_names, and no cell is NaN/Inf.
struct FeatureTable {
    std::vector<std::string> column_names;
    std::vector<double> values;  // row-major, rows x cols
    std::vector<int> labels;
    std::vector<std::string> class_names;

    std::size_t rows() const { return labels.size(); }
    std::size_t cols() const { return column_names.size(); }

    double at(std::size_t row, std::size_t col) const { return values[row * cols() + col]; }
    double& at(std::size_t row, std::size_t col) { return values[row * cols() + col]; }

    const double* row_ptr(std::size_t row) const { return values.data() + row * cols(); }

    /// Per-class row counts (length = class_names.size()).
    std::vector<std::size_t> class_counts() const {
        std::vector<std::size_t> counts(class_names.size(), 0);
        for (const int label : labels) counts[static_cast<std::size_t>(label)]++;
        return counts;
    }

    /// New table containing the given rows, in the given order.
    FeatureTable select_rows(const std::vector<std::size_t>& row_indices) const {
        FeatureTable out;
        out.column_names = column_names;
        out.class_names = class_names;
        out.labels.reserve(row_indices.size());
        out.values.reserve(row_indices.size() * cols());
        for (const std::size_t r : row_indices) {
            out.labels.push_back(labels[r]);
            const double* src = row_ptr(r);
            out.values.insert(out.values.end(), src, src + cols());
        }
        return out;
    }
};

/// Disjoint train/validation/test row-index partition.
struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;  // may be empty
    std::vector<std::size_t> test;
    std::uint64_t seed = 0;
};

/// Gaussian blob generator profile for dataset-free runs. Class c is an
/// isotropic unit-variance Gaussian with mean c*class_separation on every
/// coordinate.
struct SynthProfile {
    int n_classes = 2;
    int n_features = 1;
    double class_separation = 0.0;
    int n_per_class = 100;
    std::uint64_t seed = 0;
};

}  // namespace featcode
