#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "featcode/feature_table.hpp"

namespace featcode {

enum class ScalerKind { minmax, standard };

/// Per-column scaling statistics, fitted on training rows only.
struct ScalerParams {
    ScalerKind kind = ScalerKind::minmax;
    // minmax: lo/hi are column min/max; standard: lo = mean, hi = population sigma
    std::vector<double> lo;
    std::vector<double> hi;
    std::vector<bool> constant;  // max == min, or sigma == 0
};

enum class ScoreMethod { chi2, anova_f };

struct FeatureScores {
    ScoreMethod method = ScoreMethod::chi2;
    std::vector<double> scores;        // one per feature; +inf marks a degenerate ANOVA column
    std::vector<bool> degenerate;      // ANOVA columns with zero within-class variance
    std::size_t df_between = 0;        // k - 1
    std::size_t df_within = 0;         // n - k
};

/// Serialized barcode contents: selected feature values rendered as
/// fixed-point decimals, comma-joined, ASCII.
struct Payload {
    std::vector<std::uint8_t> bytes;
    std::vector<std::size_t> feature_indices;
    int precision = 4;
};

ScalerParams fit_scaler(const FeatureTable& table, const std::vector<std::size_t>& train_rows,
                        ScalerKind kind);

/// Applies the fitted scaler to every row. Minmax output is clamped to
/// [0,1]; constant columns map to 0.
FeatureTable apply_scaler(const FeatureTable& table, const ScalerParams& params);

/// Chi-square statistic of each (non-negative) feature against the class
/// labels, over the given rows.
FeatureScores chi2_scores(const FeatureTable& table, const std::vector<std::size_t>& rows);

/// One-way ANOVA F statistic of each feature against the class labels.
FeatureScores anova_f_scores(const FeatureTable& table, const std::vector<std::size_t>& rows);

/// Indices of the k best-scoring features, by descending score then
/// ascending column index.
std::vector<std::size_t> select_k_best(const FeatureScores& scores, std::size_t k);

/// Renders values (each in [0,1]) as "0.dddd" fixed-point decimals with the
/// given precision, joined by commas.
Payload serialize_payload(const std::vector<double>& values, int precision);

/// Selection manifest JSON: {method, k, indices, scores} plus the fitted
/// scaler so later stages can reproduce the transform.
void save_selection_manifest(const std::string& path, const FeatureScores& scores,
                             const std::vector<std::size_t>& indices, const ScalerParams& scaler);

struct SelectionManifest {
    ScoreMethod method;
    std::size_t k;
    std::vector<std::size_t> indices;
    std::vector<double> scores;
    ScalerParams scaler;
};

SelectionManifest load_selection_manifest(const std::string& path);

}  // namespace featcode
