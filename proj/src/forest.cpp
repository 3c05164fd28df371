#include "featcode/forest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "featcode/errors.hpp"
#include "featcode/parallel.hpp"
#include "featcode/rng.hpp"

namespace featcode {

double gini_impurity(const std::vector<std::int64_t>& histogram) {
    std::int64_t n = 0;
    for (const std::int64_t c : histogram) n += c;
    if (n == 0) return 0.0;
    double sum_sq = 0.0;
    for (const std::int64_t c : histogram) {
        const double p = static_cast<double>(c) / static_cast<double>(n);
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

double entropy_impurity(const std::vector<std::int64_t>& histogram) {
    std::int64_t n = 0;
    for (const std::int64_t c : histogram) n += c;
    if (n == 0) return 0.0;
    double h = 0.0;
    for (const std::int64_t c : histogram) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / static_cast<double>(n);
        h -= p * std::log2(p);
    }
    return h;
}

int DecisionTree::predict(const double* row) const {
    const std::vector<std::int64_t>& hist = leaf_histogram(row);
    int best = 0;
    for (std::size_t c = 1; c < hist.size(); ++c) {
        if (hist[c] > hist[static_cast<std::size_t>(best)]) best = static_cast<int>(c);
    }
    return best;
}

const std::vector<std::int64_t>& DecisionTree::leaf_histogram(const double* row) const {
    int node = 0;
    while (nodes[static_cast<std::size_t>(node)].feature >= 0) {
        const Node& n = nodes[static_cast<std::size_t>(node)];
        node = row[n.feature] <= n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(node)].histogram;
}

namespace {

struct TreeBuilder {
    const FeatureTable& table;
    SplitCriterion criterion;
    int max_features;
    Rng rng;
    DecisionTree tree;
    std::vector<std::size_t> rows;  // reordered in place while splitting

    double impurity(const std::vector<std::int64_t>& hist) const {
        return criterion == SplitCriterion::gini ? gini_impurity(hist) : entropy_impurity(hist);
    }

    struct Split {
        int feature = -1;
        double threshold = 0.0;
        double score = 0.0;  // weighted child impurity, lower is better
    };

    // Best threshold on one feature over rows[begin, end); valid only if the
    // feature is non-constant there.
    bool best_threshold(int feature, std::size_t begin, std::size_t end,
                        const std::vector<std::int64_t>& hist, Split& out) {
        const std::size_t n = end - begin;
        scratch.clear();
        scratch.reserve(n);
        for (std::size_t i = begin; i < end; ++i) {
            scratch.push_back({table.at(rows[i], static_cast<std::size_t>(feature)),
                               table.labels[rows[i]]});
        }
        std::sort(scratch.begin(), scratch.end());
        if (scratch.front().first == scratch.back().first) return false;

        std::vector<std::int64_t> left(hist.size(), 0);
        std::vector<std::int64_t> right = hist;
        bool found = false;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const std::size_t cls = static_cast<std::size_t>(scratch[i].second);
            left[cls]++;
            right[cls]--;
            if (scratch[i].first == scratch[i + 1].first) continue;
            const double n_left = static_cast<double>(i + 1);
            const double n_right = static_cast<double>(n - i - 1);
            const double score =
                (n_left * impurity(left) + n_right * impurity(right)) / static_cast<double>(n);
            if (!found || score < out.score) {
                found = true;
                out.feature = feature;
                out.threshold = scratch[i].first + (scratch[i + 1].first - scratch[i].first) / 2.0;
                out.score = score;
            }
        }
        return found;
    }

    int build(std::size_t begin, std::size_t end) {
        std::vector<std::int64_t> hist(table.class_names.size(), 0);
        for (std::size_t i = begin; i < end; ++i) hist[static_cast<std::size_t>(table.labels[rows[i]])]++;

        const int node_index = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes.back().histogram = hist;

        const std::size_t n = end - begin;
        std::int64_t dominant = *std::max_element(hist.begin(), hist.end());
        if (n < 2 || dominant == static_cast<std::int64_t>(n)) return node_index;  // pure or tiny

        // visit features in a seeded random order; after max_features
        // candidates, keep going only until some valid split exists
        const int d = static_cast<int>(table.cols());
        feature_order.resize(static_cast<std::size_t>(d));
        std::iota(feature_order.begin(), feature_order.end(), 0);
        rng.shuffle(feature_order);

        Split best;
        bool found = false;
        int inspected = 0;
        for (const int feature : feature_order) {
            if (inspected >= max_features && found) break;
            Split candidate;
            if (best_threshold(feature, begin, end, hist, candidate)) {
                if (!found || candidate.score < best.score) {
                    best = candidate;
                    found = true;
                }
            }
            ++inspected;
        }
        if (!found) return node_index;  // duplicate points with mixed labels

        const auto middle = std::partition(
            rows.begin() + static_cast<std::ptrdiff_t>(begin),
            rows.begin() + static_cast<std::ptrdiff_t>(end), [&](std::size_t r) {
                return table.at(r, static_cast<std::size_t>(best.feature)) <= best.threshold;
            });
        const std::size_t split_at = static_cast<std::size_t>(middle - rows.begin());

        const int left = build(begin, split_at);
        const int right = build(split_at, end);
        DecisionTree::Node& node = tree.nodes[static_cast<std::size_t>(node_index)];
        node.feature = best.feature;
        node.threshold = best.threshold;
        node.left = left;
        node.right = right;
        return node_index;
    }

    std::vector<std::pair<double, int>> scratch;
    std::vector<int> feature_order;
};

}  // namespace

ForestModel train_random_forest(const FeatureTable& table,
                                const std::vector<std::size_t>& train_rows,
                                const ForestConfig& config) {
    if (train_rows.empty()) throw ValueError("cannot train a forest on zero rows");
    if (config.n_estimators < 1) throw ValueError("n_estimators must be >= 1");

    ForestModel model;
    model.config = config;
    model.n_classes = static_cast<int>(table.class_names.size());
    model.trees.resize(static_cast<std::size_t>(config.n_estimators));

    const int max_features =
        config.max_features > 0
            ? config.max_features
            : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(table.cols()))));

    parallel_chunks(static_cast<std::size_t>(config.n_estimators), config.threads,
                    [&](int, std::size_t lo, std::size_t hi) {
                        for (std::size_t t = lo; t < hi; ++t) {
                            Rng rng(config.seed + t);  // schedule-independent per-tree stream
                            std::vector<std::size_t> rows;
                            rows.reserve(train_rows.size());
                            if (config.bootstrap) {
                                for (std::size_t i = 0; i < train_rows.size(); ++i) {
                                    rows.push_back(train_rows[rng.next_below(train_rows.size())]);
                                }
                            } else {
                                rows = train_rows;
                            }
                            TreeBuilder builder{table,
                                                config.criterion,
                                                max_features,
                                                Rng(config.seed + t + 0x9E3779B9u),
                                                {},
                                                std::move(rows),
                                                {},
                                                {}};
                            builder.build(0, builder.rows.size());
                            model.trees[t] = std::move(builder.tree);
                        }
                    });
    return model;
}

int ForestModel::predict(const double* row) const {
    std::vector<int> votes(static_cast<std::size_t>(n_classes), 0);
    for (const DecisionTree& tree : trees) votes[static_cast<std::size_t>(tree.predict(row))]++;
    int best = 0;
    for (int c = 1; c < n_classes; ++c) {
        if (votes[static_cast<std::size_t>(c)] > votes[static_cast<std::size_t>(best)]) best = c;
    }
    return best;
}

std::vector<int> ForestModel::predict_rows(const FeatureTable& table,
                                           const std::vector<std::size_t>& rows) const {
    std::vector<int> out(rows.size());
    parallel_chunks(rows.size(), config.threads, [&](int, std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) out[i] = predict(table.row_ptr(rows[i]));
    });
    return out;
}

void save_forest(const ForestModel& model, const std::string& path) {
    nlohmann::json doc;
    doc["n_classes"] = model.n_classes;
    doc["n_estimators"] = model.config.n_estimators;
    doc["criterion"] = model.config.criterion == SplitCriterion::gini ? "gini" : "entropy";
    doc["seed"] = model.config.seed;
    nlohmann::json trees = nlohmann::json::array();
    for (const DecisionTree& tree : model.trees) {
        nlohmann::json nodes = nlohmann::json::array();
        for (const DecisionTree::Node& n : tree.nodes) {
            nodes.push_back({{"f", n.feature},
                             {"t", n.threshold},
                             {"l", n.left},
                             {"r", n.right},
                             {"h", n.histogram}});
        }
        trees.push_back(std::move(nodes));
    }
    doc["trees"] = std::move(trees);
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << doc.dump() << '\n';
}

ForestModel load_forest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    nlohmann::json doc;
    in >> doc;
    ForestModel model;
    model.n_classes = doc.at("n_classes").get<int>();
    model.config.n_estimators = doc.at("n_estimators").get<int>();
    model.config.criterion =
        doc.at("criterion").get<std::string>() == "gini" ? SplitCriterion::gini
                                                         : SplitCriterion::entropy;
    model.config.seed = doc.at("seed").get<std::uint64_t>();
    for (const auto& tree_json : doc.at("trees")) {
        DecisionTree tree;
        for (const auto& n : tree_json) {
            DecisionTree::Node node;
            node.feature = n.at("f").get<int>();
            node.threshold = n.at("t").get<double>();
            node.left = n.at("l").get<int>();
            node.right = n.at("r").get<int>();
            node.histogram = n.at("h").get<std::vector<std::int64_t>>();
            tree.nodes.push_back(std::move(node));
        }
        model.trees.push_back(std::move(tree));
    }
    return model;
}

}  // namespace featcode
