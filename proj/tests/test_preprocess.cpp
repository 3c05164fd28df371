#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include "featcode/dataset.hpp"
#include "featcode/errors.hpp"
#include "featcode/preprocess.hpp"
#include "featcode/rng.hpp"

using namespace featcode;

namespace {

FeatureTable table_from(const std::vector<std::vector<double>>& rows,
                        const std::vector<int>& labels, std::size_t n_classes = 2) {
    FeatureTable table;
    for (std::size_t j = 0; j < rows.front().size(); ++j)
        table.column_names.push_back("f" + std::to_string(j));
    for (std::size_t c = 0; c < n_classes; ++c)
        table.class_names.push_back("class" + std::to_string(c));
    for (const auto& row : rows) table.values.insert(table.values.end(), row.begin(), row.end());
    table.labels = labels;
    return table;
}

std::vector<std::size_t> all_rows(const FeatureTable& table) {
    std::vector<std::size_t> rows(table.rows());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    return rows;
}

// Plain-summation scoring oracles, kept independent of the library path.
std::vector<double> chi2_oracle(const FeatureTable& t) {
    const std::size_t k = t.class_names.size();
    std::vector<double> scores(t.cols(), 0.0);
    std::vector<double> class_n(k, 0.0);
    for (const int label : t.labels) class_n[static_cast<std::size_t>(label)] += 1.0;
    for (std::size_t j = 0; j < t.cols(); ++j) {
        std::vector<double> observed(k, 0.0);
        double total = 0.0;
        for (std::size_t r = 0; r < t.rows(); ++r) {
            observed[static_cast<std::size_t>(t.labels[r])] += t.at(r, j);
            total += t.at(r, j);
        }
        if (total == 0.0) continue;
        double chi = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            if (class_n[c] == 0.0) continue;
            const double expected = total * class_n[c] / static_cast<double>(t.rows());
            chi += (observed[c] - expected) * (observed[c] - expected) / expected;
        }
        scores[j] = chi;
    }
    return scores;
}

std::vector<double> anova_oracle(const FeatureTable& t) {
    const std::size_t k_all = t.class_names.size();
    std::vector<double> scores(t.cols(), 0.0);
    std::vector<double> class_n(k_all, 0.0);
    for (const int label : t.labels) class_n[static_cast<std::size_t>(label)] += 1.0;
    std::size_t k = 0;
    for (const double c : class_n) k += c > 0 ? 1 : 0;
    const double n = static_cast<double>(t.rows());
    for (std::size_t j = 0; j < t.cols(); ++j) {
        std::vector<double> mean(k_all, 0.0);
        double grand = 0.0;
        for (std::size_t r = 0; r < t.rows(); ++r) {
            mean[static_cast<std::size_t>(t.labels[r])] += t.at(r, j);
            grand += t.at(r, j);
        }
        grand /= n;
        for (std::size_t c = 0; c < k_all; ++c)
            if (class_n[c] > 0) mean[c] /= class_n[c];
        double ss_between = 0.0, ss_within = 0.0;
        for (std::size_t c = 0; c < k_all; ++c)
            if (class_n[c] > 0) ss_between += class_n[c] * (mean[c] - grand) * (mean[c] - grand);
        for (std::size_t r = 0; r < t.rows(); ++r) {
            const double d = t.at(r, j) - mean[static_cast<std::size_t>(t.labels[r])];
            ss_within += d * d;
        }
        if (ss_between == 0.0)
            scores[j] = 0.0;
        else if (ss_within == 0.0)
            scores[j] = std::numeric_limits<double>::infinity();
        else
            scores[j] = (ss_between / static_cast<double>(k - 1)) /
                        (ss_within / (n - static_cast<double>(k)));
    }
    return scores;
}

}  // namespace

TEST_CASE("scaler fit: direct hand values") {
    const FeatureTable t = table_from({{2}, {4}, {6}}, {0, 0, 1});
    const ScalerParams mm = fit_scaler(t, all_rows(t), ScalerKind::minmax);
    CHECK(mm.lo[0] == 2.0);
    CHECK(mm.hi[0] == 6.0);

    const ScalerParams st = fit_scaler(t, all_rows(t), ScalerKind::standard);
    CHECK(st.lo[0] == doctest::Approx(4.0));
    CHECK(st.hi[0] == doctest::Approx(std::sqrt(8.0 / 3.0)));  // population sigma

    const FeatureTable constant = table_from({{5}, {5}}, {0, 1});
    const ScalerParams cs = fit_scaler(constant, all_rows(constant), ScalerKind::standard);
    CHECK(cs.hi[0] == 0.0);
    CHECK(cs.constant[0]);
}

TEST_CASE("apply minmax: unit range on fit rows, clamping beyond them") {
    const FeatureTable t = table_from({{2, 10}, {4, 20}, {6, 30}}, {0, 0, 1});
    const ScalerParams params = fit_scaler(t, all_rows(t), ScalerKind::minmax);
    const FeatureTable scaled = apply_scaler(t, params);
    CHECK(scaled.at(0, 0) == 0.0);
    CHECK(scaled.at(2, 0) == 1.0);
    CHECK(scaled.at(1, 0) == doctest::Approx(0.5));

    const FeatureTable out_of_range = table_from({{1, 40}}, {0});
    const FeatureTable clamped = apply_scaler(out_of_range, params);
    CHECK(clamped.at(0, 0) == 0.0);  // below train min
    CHECK(clamped.at(0, 1) == 1.0);  // above train max
}

TEST_CASE("standard scaling then refit gives mean 0 sigma 1") {
    Rng rng(5);
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 40; ++i) rows.push_back({rng.next_unit() * 9.0, rng.next_normal()});
    std::vector<int> labels(40, 0);
    labels[1] = 1;
    const FeatureTable t = table_from(rows, labels);
    const FeatureTable scaled = apply_scaler(t, fit_scaler(t, all_rows(t), ScalerKind::standard));
    const ScalerParams refit = fit_scaler(scaled, all_rows(scaled), ScalerKind::standard);
    for (std::size_t j = 0; j < 2; ++j) {
        CHECK(refit.lo[j] == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(refit.hi[j] == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("chi2: two-row hand example and zero-mass column") {
    const FeatureTable t = table_from({{1, 0}, {0, 0}}, {0, 1});
    const FeatureScores scores = chi2_scores(t, all_rows(t));
    CHECK(scores.scores[0] == doctest::Approx(1.0));
    CHECK(scores.scores[1] == 0.0);
}

TEST_CASE("chi2 rejects negative input naming the cell") {
    const FeatureTable t = table_from({{1.0}, {-0.5}}, {0, 1});
    try {
        chi2_scores(t, all_rows(t));
        FAIL("expected ValueError");
    } catch (const ValueError& e) {
        const std::string what = e.what();
        CHECK(what.find("f0") != std::string::npos);
        CHECK(what.find("row 1") != std::string::npos);
    }
}

TEST_CASE("anova: hand example, degenerate and constant columns") {
    const FeatureTable t = table_from({{0}, {1}, {2}, {3}}, {0, 1, 0, 1});
    const FeatureScores scores = anova_f_scores(t, all_rows(t));
    CHECK(scores.scores[0] == doctest::Approx(0.5));  // (1/1)/(4/2)

    const FeatureTable degenerate = table_from({{0}, {0}, {1}, {1}, {0}, {1}},
                                               {0, 0, 1, 1, 0, 1});
    const FeatureScores dg = anova_f_scores(degenerate, all_rows(degenerate));
    CHECK(std::isinf(dg.scores[0]));
    CHECK(dg.degenerate[0]);

    const FeatureTable constant = table_from({{7}, {7}, {7}}, {0, 1, 0});
    const FeatureScores cs = anova_f_scores(constant, all_rows(constant));
    CHECK(cs.scores[0] == 0.0);

    const FeatureTable too_small = table_from({{0}, {1}}, {0, 1});
    CHECK_THROWS_AS(anova_f_scores(too_small, all_rows(too_small)), ValueError);
}

TEST_CASE("scores match brute-force oracles to 1e-12 relative on 200 random tables") {
    Rng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n_rows = 8 + rng.next_below(23);
        const std::size_t n_cols = 1 + rng.next_below(5);
        const std::size_t n_classes = 2 + rng.next_below(3);
        std::vector<std::vector<double>> rows;
        std::vector<int> labels;
        for (std::size_t r = 0; r < n_rows; ++r) {
            std::vector<double> row;
            for (std::size_t j = 0; j < n_cols; ++j) row.push_back(rng.next_unit());
            rows.push_back(row);
            labels.push_back(static_cast<int>(r % n_classes));  // every class present
        }
        const FeatureTable t = table_from(rows, labels, n_classes);

        const FeatureScores chi = chi2_scores(t, all_rows(t));
        const std::vector<double> chi_expected = chi2_oracle(t);
        for (std::size_t j = 0; j < n_cols; ++j) {
            CHECK(std::abs(chi.scores[j] - chi_expected[j]) <=
                  1e-12 * std::max(1.0, std::abs(chi_expected[j])));
        }
        const FeatureScores anova = anova_f_scores(t, all_rows(t));
        const std::vector<double> anova_expected = anova_oracle(t);
        for (std::size_t j = 0; j < n_cols; ++j) {
            CHECK(std::abs(anova.scores[j] - anova_expected[j]) <=
                  1e-12 * std::max(1.0, std::abs(anova_expected[j])));
        }
    }
}

TEST_CASE("scoring is permutation-equivariant over feature columns") {
    Rng rng(31);
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int r = 0; r < 30; ++r) {
        std::vector<double> row;
        for (int j = 0; j < 10; ++j) row.push_back(rng.next_unit());
        rows.push_back(row);
        labels.push_back(r % 3);
    }
    const FeatureTable t = table_from(rows, labels, 3);

    // reverse the column order
    FeatureTable reversed = t;
    for (std::size_t r = 0; r < t.rows(); ++r)
        for (std::size_t j = 0; j < t.cols(); ++j) reversed.at(r, j) = t.at(r, t.cols() - 1 - j);

    const FeatureScores a = chi2_scores(t, all_rows(t));
    const FeatureScores b = chi2_scores(reversed, all_rows(reversed));
    const FeatureScores fa = anova_f_scores(t, all_rows(t));
    const FeatureScores fb = anova_f_scores(reversed, all_rows(reversed));
    for (std::size_t j = 0; j < t.cols(); ++j) {
        CHECK(a.scores[j] == doctest::Approx(b.scores[t.cols() - 1 - j]));
        CHECK(fa.scores[j] == doctest::Approx(fb.scores[t.cols() - 1 - j]));
    }
}

TEST_CASE("select_k_best ordering, ties, bounds, monotone invariance") {
    FeatureScores scores;
    scores.scores = {3, 1, 2};
    CHECK(select_k_best(scores, 2) == std::vector<std::size_t>{0, 2});

    scores.scores = {1, 1, 0};
    CHECK(select_k_best(scores, 1) == std::vector<std::size_t>{0});  // tie -> lower index

    CHECK_THROWS_AS(select_k_best(scores, 0), ValueError);
    CHECK_THROWS_AS(select_k_best(scores, 4), ValueError);

    Rng rng(8);
    FeatureScores random_scores;
    for (int i = 0; i < 20; ++i) random_scores.scores.push_back(rng.next_unit());
    const auto picked = select_k_best(random_scores, 7);
    FeatureScores transformed = random_scores;
    for (double& s : transformed.scores) s = 2.0 * s + 1.0;  // strictly monotone map
    CHECK(select_k_best(transformed, 7) == picked);
}

TEST_CASE("payload serialization: formats, byte counts, boundaries") {
    const Payload p = serialize_payload({0.5, 0.25}, 4);
    CHECK(std::string(p.bytes.begin(), p.bytes.end()) == "0.5000,0.2500");
    CHECK(p.bytes.size() == 13);

    std::vector<double> ten(10, 0.1234);
    CHECK(serialize_payload(ten, 4).bytes.size() == 69);  // 10*6 + 9

    const Payload one = serialize_payload({1.0}, 2);
    CHECK(std::string(one.bytes.begin(), one.bytes.end()) == "1.00");

    // rounding up to 1 keeps the fixed width
    const Payload carry = serialize_payload({0.99999}, 4);
    CHECK(std::string(carry.bytes.begin(), carry.bytes.end()) == "1.0000");

    CHECK_THROWS_AS(serialize_payload({-0.1}, 4), ValueError);
    CHECK_THROWS_AS(serialize_payload({1.1}, 4), ValueError);
    CHECK_THROWS_AS(serialize_payload({0.5}, 0), ValueError);
    CHECK_THROWS_AS(serialize_payload({0.5}, 9), ValueError);
}

TEST_CASE("payload serialization is injective on the representable grid") {
    // distinct 2-digit grids must serialize to distinct byte strings
    std::set<std::string> seen;
    for (int a = 0; a <= 100; a += 7) {
        for (int b = 0; b <= 100; b += 13) {
            const Payload p = serialize_payload({a / 100.0, b / 100.0}, 2);
            CHECK(seen.insert(std::string(p.bytes.begin(), p.bytes.end())).second);
        }
    }
}

TEST_CASE("selection manifest round-trip") {
    FeatureScores scores;
    scores.method = ScoreMethod::anova_f;
    scores.scores = {0.5, 3.0, 1.5, 0.1};
    scores.degenerate.assign(4, false);
    const std::vector<std::size_t> indices = select_k_best(scores, 2);
    ScalerParams scaler;
    scaler.kind = ScalerKind::minmax;
    scaler.lo = {0, 1, 2, 3};
    scaler.hi = {1, 2, 2, 9};
    scaler.constant = {false, false, true, false};
    save_selection_manifest("sel.json", scores, indices, scaler);
    const SelectionManifest manifest = load_selection_manifest("sel.json");
    CHECK(manifest.method == ScoreMethod::anova_f);
    CHECK(manifest.k == 2);
    CHECK(manifest.indices == indices);
    CHECK(manifest.scores == std::vector<double>{3.0, 1.5});
    CHECK(manifest.scaler.lo == scaler.lo);
    CHECK(manifest.scaler.constant == scaler.constant);
    std::remove("sel.json");
}
