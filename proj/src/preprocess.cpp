#include "featcode/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "featcode/errors.hpp"

namespace featcode {

ScalerParams fit_scaler(const FeatureTable& table, const std::vector<std::size_t>& train_rows,
                        ScalerKind kind) {
    if (train_rows.empty()) throw ValueError("cannot fit a scaler on zero rows");
    const std::size_t d = table.cols();
    ScalerParams params;
    params.kind = kind;
    params.lo.resize(d);
    params.hi.resize(d);
    params.constant.assign(d, false);

    if (kind == ScalerKind::minmax) {
        for (std::size_t j = 0; j < d; ++j) {
            double mn = std::numeric_limits<double>::infinity();
            double mx = -std::numeric_limits<double>::infinity();
            for (const std::size_t r : train_rows) {
                const double v = table.at(r, j);
                mn = std::min(mn, v);
                mx = std::max(mx, v);
            }
            params.lo[j] = mn;
            params.hi[j] = mx;
            params.constant[j] = (mx == mn);
        }
    } else {
        for (std::size_t j = 0; j < d; ++j) {
            double sum = 0.0;
            for (const std::size_t r : train_rows) sum += table.at(r, j);
            const double mean = sum / static_cast<double>(train_rows.size());
            double ss = 0.0;
            for (const std::size_t r : train_rows) {
                const double diff = table.at(r, j) - mean;
                ss += diff * diff;
            }
            // population variance (divide by n)
            const double sigma = std::sqrt(ss / static_cast<double>(train_rows.size()));
            params.lo[j] = mean;
            params.hi[j] = sigma;
            params.constant[j] = (sigma == 0.0);
        }
    }
    return params;
}

FeatureTable apply_scaler(const FeatureTable& table, const ScalerParams& params) {
    if (params.lo.size() != table.cols())
        throw ShapeError("scaler was fitted on " + std::to_string(params.lo.size()) +
                         " columns, table has " + std::to_string(table.cols()));
    FeatureTable out = table;
    const std::size_t d = table.cols();
    for (std::size_t r = 0; r < table.rows(); ++r) {
        for (std::size_t j = 0; j < d; ++j) {
            const double v = table.at(r, j);
            double scaled;
            if (params.constant[j]) {
                scaled = 0.0;
            } else if (params.kind == ScalerKind::minmax) {
                scaled = (v - params.lo[j]) / (params.hi[j] - params.lo[j]);
                scaled = std::clamp(scaled, 0.0, 1.0);
            } else {
                scaled = (v - params.lo[j]) / params.hi[j];
            }
            out.at(r, j) = scaled;
        }
    }
    return out;
}

FeatureScores chi2_scores(const FeatureTable& table, const std::vector<std::size_t>& rows) {
    const std::size_t d = table.cols();
    const std::size_t k = table.class_names.size();
    const std::size_t n = rows.size();

    std::vector<std::size_t> class_count(k, 0);
    for (const std::size_t r : rows) class_count[static_cast<std::size_t>(table.labels[r])]++;

    FeatureScores result;
    result.method = ScoreMethod::chi2;
    result.scores.assign(d, 0.0);
    result.degenerate.assign(d, false);
    std::size_t present = 0;
    for (const std::size_t c : class_count) present += (c > 0) ? 1 : 0;
    result.df_between = present > 0 ? present - 1 : 0;
    result.df_within = 0;

    std::vector<double> observed(k);
    for (std::size_t j = 0; j < d; ++j) {
        std::fill(observed.begin(), observed.end(), 0.0);
        for (const std::size_t r : rows) {
            const double v = table.at(r, j);
            if (v < 0.0) {
                throw ValueError("chi2 requires non-negative values; column '" +
                                 table.column_names[j] + "' row " + std::to_string(r) + " is " +
                                 std::to_string(v));
            }
            observed[static_cast<std::size_t>(table.labels[r])] += v;
        }
        const double total = std::accumulate(observed.begin(), observed.end(), 0.0);
        if (total == 0.0) continue;  // feature carries no mass, score 0
        double score = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            if (class_count[c] == 0) continue;
            const double expected =
                total * static_cast<double>(class_count[c]) / static_cast<double>(n);
            const double diff = observed[c] - expected;
            score += diff * diff / expected;
        }
        result.scores[j] = score;
    }
    return result;
}

FeatureScores anova_f_scores(const FeatureTable& table, const std::vector<std::size_t>& rows) {
    const std::size_t d = table.cols();
    const std::size_t n = rows.size();

    std::vector<std::size_t> class_count(table.class_names.size(), 0);
    for (const std::size_t r : rows) class_count[static_cast<std::size_t>(table.labels[r])]++;
    std::size_t k = 0;
    for (const std::size_t c : class_count) k += (c > 0) ? 1 : 0;
    if (k < 2) throw ValueError("ANOVA needs at least 2 classes present");
    if (n <= k) throw ValueError("ANOVA needs more rows than classes (n=" + std::to_string(n) +
                                 ", k=" + std::to_string(k) + ")");

    FeatureScores result;
    result.method = ScoreMethod::anova_f;
    result.scores.assign(d, 0.0);
    result.degenerate.assign(d, false);
    result.df_between = k - 1;
    result.df_within = n - k;

    std::vector<double> class_sum(class_count.size());
    for (std::size_t j = 0; j < d; ++j) {
        std::fill(class_sum.begin(), class_sum.end(), 0.0);
        double total = 0.0;
        for (const std::size_t r : rows) {
            const double v = table.at(r, j);
            class_sum[static_cast<std::size_t>(table.labels[r])] += v;
            total += v;
        }
        const double grand_mean = total / static_cast<double>(n);

        double ss_between = 0.0;
        for (std::size_t c = 0; c < class_count.size(); ++c) {
            if (class_count[c] == 0) continue;
            const double mean_c = class_sum[c] / static_cast<double>(class_count[c]);
            const double diff = mean_c - grand_mean;
            ss_between += static_cast<double>(class_count[c]) * diff * diff;
        }
        double ss_within = 0.0;
        for (const std::size_t r : rows) {
            const std::size_t c = static_cast<std::size_t>(table.labels[r]);
            const double diff = table.at(r, j) - class_sum[c] / static_cast<double>(class_count[c]);
            ss_within += diff * diff;
        }

        if (ss_between == 0.0) {
            result.scores[j] = 0.0;  // identical class means, nothing to rank
        } else if (ss_within == 0.0) {
            result.scores[j] = std::numeric_limits<double>::infinity();
            result.degenerate[j] = true;
        } else {
            result.scores[j] = (ss_between / static_cast<double>(k - 1)) /
                               (ss_within / static_cast<double>(n - k));
        }
    }
    return result;
}

std::vector<std::size_t> select_k_best(const FeatureScores& scores, std::size_t k) {
    const std::size_t d = scores.scores.size();
    if (k < 1 || k > d) {
        throw ValueError("k must be in [1, " + std::to_string(d) + "], got " + std::to_string(k));
    }
    std::vector<std::size_t> order(d);
    for (std::size_t i = 0; i < d; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores.scores[a] != scores.scores[b]) return scores.scores[a] > scores.scores[b];
        return a < b;  // ties break toward the lower column index
    });
    order.resize(k);
    return order;
}

Payload serialize_payload(const std::vector<double>& values, int precision) {
    if (precision < 1 || precision > 8)
        throw ValueError("precision must be in [1, 8], got " + std::to_string(precision));
    long long scale = 1;
    for (int i = 0; i < precision; ++i) scale *= 10;

    Payload payload;
    payload.precision = precision;
    std::string text;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = values[i];
        if (v < 0.0 || v > 1.0) {
            throw ValueError("payload value " + std::to_string(v) + " at position " +
                             std::to_string(i) + " is outside [0, 1]");
        }
        if (i > 0) text += ',';
        const long long fixed = std::llround(v * static_cast<double>(scale));
        if (fixed >= scale) {
            text += "1.";
            text.append(static_cast<std::size_t>(precision), '0');
        } else {
            std::string digits = std::to_string(fixed);
            text += "0.";
            text.append(static_cast<std::size_t>(precision) - digits.size(), '0');
            text += digits;
        }
    }
    payload.bytes.assign(text.begin(), text.end());
    return payload;
}

namespace {

const char* method_name(ScoreMethod method) {
    return method == ScoreMethod::chi2 ? "chi2" : "anova_f";
}

ScoreMethod method_from_name(const std::string& name) {
    if (name == "chi2") return ScoreMethod::chi2;
    if (name == "anova_f") return ScoreMethod::anova_f;
    throw ValueError("unknown score method '" + name + "'");
}

}  // namespace

void save_selection_manifest(const std::string& path, const FeatureScores& scores,
                             const std::vector<std::size_t>& indices, const ScalerParams& scaler) {
    nlohmann::json doc;
    doc["method"] = method_name(scores.method);
    doc["k"] = indices.size();
    doc["indices"] = indices;
    std::vector<double> selected_scores;
    selected_scores.reserve(indices.size());
    for (const std::size_t i : indices) selected_scores.push_back(scores.scores[i]);
    doc["scores"] = selected_scores;
    doc["scaler"]["kind"] = scaler.kind == ScalerKind::minmax ? "minmax" : "standard";
    doc["scaler"]["lo"] = scaler.lo;
    doc["scaler"]["hi"] = scaler.hi;
    doc["scaler"]["constant"] = std::vector<int>(scaler.constant.begin(), scaler.constant.end());

    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("write failure on '" + path + "'");
}

SelectionManifest load_selection_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    nlohmann::json doc;
    in >> doc;

    SelectionManifest manifest;
    manifest.method = method_from_name(doc.at("method").get<std::string>());
    manifest.k = doc.at("k").get<std::size_t>();
    manifest.indices = doc.at("indices").get<std::vector<std::size_t>>();
    manifest.scores = doc.at("scores").get<std::vector<double>>();
    manifest.scaler.kind =
        doc.at("scaler").at("kind").get<std::string>() == "minmax" ? ScalerKind::minmax
                                                                   : ScalerKind::standard;
    manifest.scaler.lo = doc.at("scaler").at("lo").get<std::vector<double>>();
    manifest.scaler.hi = doc.at("scaler").at("hi").get<std::vector<double>>();
    const auto constant = doc.at("scaler").at("constant").get<std::vector<int>>();
    manifest.scaler.constant.assign(constant.begin(), constant.end());
    return manifest;
}

}  // namespace featcode
