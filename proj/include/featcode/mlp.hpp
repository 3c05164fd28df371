#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "featcode/feature_table.hpp"

namespace featcode {

enum class MlpSolver { adam, sgd };

struct MlpConfig {
    std::vector<int> hidden_sizes = {10, 10, 10};
    MlpSolver solver = MlpSolver::adam;
    double lr = 0.001;
    int max_iter = 200;    // epochs over the training rows
    int batch_size = 0;    // 0 = min(200, n)
    std::uint64_t seed = 0;
};

/// ReLU feed-forward classifier over raw (scaled) feature vectors, built on
/// the tensor engine's dense kernels.
struct MlpModel {
    MlpConfig config;
    std::vector<int> layer_sizes;  // input, hidden..., n_classes
    std::vector<std::vector<float>> weights;
    std::vector<std::vector<float>> biases;

    int n_classes() const { return layer_sizes.back(); }
    int predict(const double* row) const;
    std::vector<int> predict_rows(const FeatureTable& table,
                                  const std::vector<std::size_t>& rows) const;
};

/// Mini-batch training with softmax cross-entropy. Throws ValueError when
/// hidden_sizes is empty.
MlpModel train_mlp(const FeatureTable& table, const std::vector<std::size_t>& train_rows,
                   const MlpConfig& config);

void save_mlp(const MlpModel& model, const std::string& path);
MlpModel load_mlp(const std::string& path);

}  // namespace featcode
