#include <doctest.h>

#include <cstdio>

#include "featcode/dataset.hpp"
#include "featcode/errors.hpp"
#include "featcode/forest.hpp"
#include "featcode/metrics.hpp"
#include "featcode/mlp.hpp"
#include "featcode/preprocess.hpp"
#include "featcode/svc.hpp"

using namespace featcode;

namespace {

std::vector<std::size_t> all_rows(const FeatureTable& table) {
    std::vector<std::size_t> rows(table.rows());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    return rows;
}

FeatureTable xor_table() {
    FeatureTable table;
    table.column_names = {"x", "y"};
    table.class_names = {"zero", "one"};
    table.values = {0, 0, 0, 1, 1, 0, 1, 1};
    table.labels = {0, 1, 1, 0};
    return table;
}

FeatureTable separable_blobs(std::uint64_t seed, int n_per_class = 500) {
    SynthProfile profile;
    profile.n_classes = 2;
    profile.n_features = 1;
    profile.class_separation = 6.0;
    profile.n_per_class = n_per_class;
    profile.seed = seed;
    return synth_generate(profile);
}

}  // namespace

TEST_CASE("impurity helpers: pure and balanced nodes") {
    CHECK(gini_impurity({10, 0}) == 0.0);
    CHECK(gini_impurity({5, 5}) == doctest::Approx(0.5));
    CHECK(entropy_impurity({8, 0, 0}) == 0.0);
    CHECK(entropy_impurity({4, 4}) == doctest::Approx(1.0));
}

TEST_CASE("single unbootstrapped tree memorizes distinct training points") {
    SynthProfile profile;
    profile.n_classes = 3;
    profile.n_features = 4;
    profile.class_separation = 0.5;  // heavily overlapping, must still memorize
    profile.n_per_class = 40;
    profile.seed = 17;
    const FeatureTable table = synth_generate(profile);

    ForestConfig config;
    config.n_estimators = 1;
    config.bootstrap = false;
    config.seed = 3;
    const ForestModel forest = train_random_forest(table, all_rows(table), config);
    const std::vector<int> predicted = forest.predict_rows(table, all_rows(table));
    const Evaluation eval = evaluate(table.labels, predicted, table.class_names);
    CHECK(eval.accuracy == 1.0);
}

TEST_CASE("forest with one tree equals that tree's predictions") {
    const FeatureTable table = separable_blobs(7, 60);
    ForestConfig config;
    config.n_estimators = 1;
    config.seed = 5;
    const ForestModel forest = train_random_forest(table, all_rows(table), config);
    for (std::size_t r = 0; r < table.rows(); r += 5) {
        CHECK(forest.predict(table.row_ptr(r)) == forest.trees[0].predict(table.row_ptr(r)));
    }
}

TEST_CASE("bootstrap determinism: same seed, same forest") {
    const FeatureTable table = separable_blobs(21, 80);
    ForestConfig config;
    config.n_estimators = 8;
    config.seed = 11;
    config.threads = 2;
    const ForestModel a = train_random_forest(table, all_rows(table), config);
    const ForestModel b = train_random_forest(table, all_rows(table), config);
    REQUIRE(a.trees.size() == b.trees.size());
    for (std::size_t t = 0; t < a.trees.size(); ++t) {
        REQUIRE(a.trees[t].nodes.size() == b.trees[t].nodes.size());
        for (std::size_t n = 0; n < a.trees[t].nodes.size(); ++n) {
            CHECK(a.trees[t].nodes[n].feature == b.trees[t].nodes[n].feature);
            CHECK(a.trees[t].nodes[n].threshold == b.trees[t].nodes[n].threshold);
        }
    }
}

TEST_CASE("tree invariant: child histograms partition the parent") {
    const FeatureTable table = separable_blobs(33, 100);
    ForestConfig config;
    config.n_estimators = 4;
    config.seed = 2;
    const ForestModel forest = train_random_forest(table, all_rows(table), config);
    for (const DecisionTree& tree : forest.trees) {
        for (const DecisionTree::Node& node : tree.nodes) {
            if (node.feature < 0) continue;
            const auto& left = tree.nodes[static_cast<std::size_t>(node.left)].histogram;
            const auto& right = tree.nodes[static_cast<std::size_t>(node.right)].histogram;
            for (std::size_t c = 0; c < node.histogram.size(); ++c) {
                CHECK(left[c] + right[c] == node.histogram[c]);
            }
        }
    }
}

TEST_CASE("forest archive round-trip preserves predictions") {
    const FeatureTable table = separable_blobs(13, 50);
    ForestConfig config;
    config.n_estimators = 3;
    config.seed = 4;
    const ForestModel model = train_random_forest(table, all_rows(table), config);
    save_forest(model, "forest.json");
    const ForestModel loaded = load_forest("forest.json");
    for (std::size_t r = 0; r < table.rows(); r += 7) {
        CHECK(loaded.predict(table.row_ptr(r)) == model.predict(table.row_ptr(r)));
    }
    std::remove("forest.json");
}

TEST_CASE("mlp solves xor within 2000 iterations") {
    const FeatureTable table = xor_table();
    MlpConfig config;
    config.hidden_sizes = {10, 10, 10};
    config.max_iter = 2000;
    config.lr = 0.01;
    config.seed = 6;
    const MlpModel model = train_mlp(table, all_rows(table), config);
    const std::vector<int> predicted = model.predict_rows(table, all_rows(table));
    CHECK(predicted == table.labels);
}

TEST_CASE("mlp rejects zero hidden layers") {
    MlpConfig config;
    config.hidden_sizes = {};
    CHECK_THROWS_AS(train_mlp(xor_table(), {0, 1, 2, 3}, config), ValueError);
}

TEST_CASE("svc separates two points with opposite-sign decisions") {
    FeatureTable table;
    table.column_names = {"x"};
    table.class_names = {"a", "b"};
    table.values = {-1.0, 1.0};
    table.labels = {0, 1};
    SvcConfig config;
    config.gamma_mode = GammaMode::auto_mode;
    const SvcModel model = train_svc(table, {0, 1}, config);
    CHECK(model.predict(table.row_ptr(0)) == 0);
    CHECK(model.predict(table.row_ptr(1)) == 1);
    const double da = model.decision(0, table.row_ptr(0));
    const double db = model.decision(0, table.row_ptr(1));
    CHECK(da > 0.0);
    CHECK(db < 0.0);
}

TEST_CASE("svc with rbf kernel separates xor") {
    const FeatureTable table = xor_table();
    SvcConfig config;
    config.kernel = SvcKernel::rbf;
    config.gamma_mode = GammaMode::value;
    config.gamma_value = 4.0;
    config.C = 10.0;
    const SvcModel model = train_svc(table, all_rows(table), config);
    const std::vector<int> predicted = model.predict_rows(table, all_rows(table));
    CHECK(predicted == table.labels);
}

TEST_CASE("svc kkt residuals within tolerance at convergence") {
    const FeatureTable raw = separable_blobs(40, 100);
    const FeatureTable table =
        apply_scaler(raw, fit_scaler(raw, all_rows(raw), ScalerKind::standard));
    SvcConfig config;
    config.seed = 9;
    const SvcModel model = train_svc(table, all_rows(table), config);
    CHECK(svc_max_kkt_violation(model) <= config.tol + 1e-6);
}

TEST_CASE("svc rejects single-class training data") {
    FeatureTable table;
    table.column_names = {"x"};
    table.class_names = {"a", "b"};
    table.values = {0.0, 1.0};
    table.labels = {0, 0};
    CHECK_THROWS_AS(train_svc(table, {0, 1}, SvcConfig{}), ValueError);
}

TEST_CASE("svc archive round-trip preserves decisions") {
    const FeatureTable table = separable_blobs(50, 40);
    SvcConfig config;
    config.seed = 3;
    const SvcModel model = train_svc(table, all_rows(table), config);
    save_svc(model, "svc.json");
    const SvcModel loaded = load_svc("svc.json");
    for (std::size_t r = 0; r < table.rows(); r += 5) {
        CHECK(loaded.decision(0, table.row_ptr(r)) ==
              doctest::Approx(model.decision(0, table.row_ptr(r))));
    }
    std::remove("svc.json");
}

TEST_CASE("all three learners clear 99 percent on separation-6 blobs") {
    const FeatureTable raw = separable_blobs(61, 500);
    const SplitIndices split = stratified_split(raw, 0.7, 0.0, 0.3, 8);

    // forest consumes raw features
    ForestConfig forest_config;
    forest_config.n_estimators = 50;
    forest_config.seed = 1;
    const ForestModel forest = train_random_forest(raw, split.train, forest_config);
    std::vector<int> truth;
    for (const std::size_t r : split.test) truth.push_back(raw.labels[r]);
    Evaluation eval = evaluate(truth, forest.predict_rows(raw, split.test), raw.class_names);
    CHECK(eval.accuracy >= 0.99);

    // mlp and svc consume standard-scaled features
    const FeatureTable scaled =
        apply_scaler(raw, fit_scaler(raw, split.train, ScalerKind::standard));
    MlpConfig mlp_config;
    mlp_config.max_iter = 60;
    mlp_config.seed = 2;
    const MlpModel mlp = train_mlp(scaled, split.train, mlp_config);
    eval = evaluate(truth, mlp.predict_rows(scaled, split.test), raw.class_names);
    CHECK(eval.accuracy >= 0.99);

    SvcConfig svc_config;
    svc_config.seed = 3;
    const SvcModel svc = train_svc(scaled, split.train, svc_config);
    eval = evaluate(truth, svc.predict_rows(scaled, split.test), raw.class_names);
    CHECK(eval.accuracy >= 0.99);
}

TEST_CASE("rf test accuracy on sep-6 1000-sample blobs beats 0.99") {
    // closed-form Bayes accuracy at separation 6 is Phi(3) ~ 0.9987
    const FeatureTable raw = separable_blobs(71, 500);
    const SplitIndices split = stratified_split(raw, 0.7, 0.0, 0.3, 5);
    ForestConfig config;
    config.n_estimators = 100;
    config.seed = 6;
    const ForestModel forest = train_random_forest(raw, split.train, config);
    std::vector<int> truth;
    for (const std::size_t r : split.test) truth.push_back(raw.labels[r]);
    const Evaluation eval = evaluate(truth, forest.predict_rows(raw, split.test), raw.class_names);
    CHECK(eval.accuracy >= 0.99);
}
