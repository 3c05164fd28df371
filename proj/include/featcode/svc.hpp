#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "featcode/feature_table.hpp"

namespace featcode {

enum class SvcKernel { rbf, poly };
enum class GammaMode { scale, auto_mode, value };

struct SvcConfig {
    SvcKernel kernel = SvcKernel::rbf;
    GammaMode gamma_mode = GammaMode::scale;
    double gamma_value = 0.0;
    double C = 1.0;
    double tol = 1e-3;
    int max_passes = 10000;           // hard cap on full SMO sweeps
    std::size_t max_train_rows = 4000;  // desk-scale cap; excess rows are subsampled
    std::uint64_t seed = 0;
};

/// One-vs-rest support vector classifier trained by SMO.
struct SvcModel {
    SvcConfig config;
    double gamma = 0.0;
    int n_classes = 0;
    std::size_t n_features = 0;
    bool subsampled = false;  // training rows exceeded max_train_rows

    std::vector<std::vector<double>> support_vectors;  // rows shared across problems
    struct BinaryProblem {
        std::vector<std::size_t> sv_index;  // into support_vectors
        std::vector<double> alpha_y;        // alpha_i * y_i
        double bias = 0.0;
    };
    std::vector<BinaryProblem> problems;  // one per class

    double kernel_value(const double* a, const double* b) const;
    double decision(int cls, const double* row) const;
    /// argmax over per-class decision values
    int predict(const double* row) const;
    std::vector<int> predict_rows(const FeatureTable& table,
                                  const std::vector<std::size_t>& rows) const;
};

/// Trains one binary SMO problem per class (one-vs-rest). Inputs should be
/// standard-scaled. Throws ValueError when the training rows contain a
/// single class.
SvcModel train_svc(const FeatureTable& table, const std::vector<std::size_t>& train_rows,
                   const SvcConfig& config);

/// Maximum KKT violation over retained support vectors of every binary
/// problem. Exposed for tests.
double svc_max_kkt_violation(const SvcModel& model);

void save_svc(const SvcModel& model, const std::string& path);
SvcModel load_svc(const std::string& path);

}  // namespace featcode
