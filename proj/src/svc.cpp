#include "featcode/svc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "featcode/errors.hpp"
#include "featcode/parallel.hpp"
#include "featcode/rng.hpp"

namespace featcode {

namespace {

double dot(const double* a, const double* b, std::size_t d) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) s += a[i] * b[i];
    return s;
}

double squared_distance(const double* a, const double* b, std::size_t d) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        const double diff = a[i] - b[i];
        s += diff * diff;
    }
    return s;
}

double kernel_eval(SvcKernel kernel, double gamma, const double* a, const double* b,
                   std::size_t d) {
    if (kernel == SvcKernel::rbf) return std::exp(-gamma * squared_distance(a, b, d));
    const double base = gamma * dot(a, b, d);  // poly: (gamma <x,y>)^3, coef0 = 0
    return base * base * base;
}

// Platt SMO over a precomputed Gram matrix for one binary problem.
struct Smo {
    const std::vector<float>& gram;
    std::size_t n;
    const std::vector<double>& y;  // +1 / -1
    double C;
    double tol;
    int max_passes;
    Rng& rng;

    std::vector<double> alpha;
    std::vector<double> fcache;  // sum_j alpha_j y_j K(i,j), bias excluded
    double b = 0.0;

    Smo(const std::vector<float>& gram_, std::size_t n_, const std::vector<double>& y_, double C_,
        double tol_, int max_passes_, Rng& rng_)
        : gram(gram_), n(n_), y(y_), C(C_), tol(tol_), max_passes(max_passes_), rng(rng_) {
        alpha.assign(n, 0.0);
        fcache.assign(n, 0.0);
    }

    double k(std::size_t i, std::size_t j) const { return gram[i * n + j]; }
    double error(std::size_t i) const { return fcache[i] + b - y[i]; }

    bool take_step(std::size_t i1, std::size_t i2) {
        if (i1 == i2) return false;
        const double a1_old = alpha[i1];
        const double a2_old = alpha[i2];
        const double y1 = y[i1];
        const double y2 = y[i2];
        const double e1 = error(i1);
        const double e2 = error(i2);
        const double s = y1 * y2;

        double lo, hi;
        if (y1 != y2) {
            lo = std::max(0.0, a2_old - a1_old);
            hi = std::min(C, C + a2_old - a1_old);
        } else {
            lo = std::max(0.0, a1_old + a2_old - C);
            hi = std::min(C, a1_old + a2_old);
        }
        if (lo >= hi) return false;

        const double eta = k(i1, i1) + k(i2, i2) - 2.0 * k(i1, i2);
        if (eta <= 0.0) return false;  // degenerate pair (duplicate points)

        double a2 = a2_old + y2 * (e1 - e2) / eta;
        a2 = std::clamp(a2, lo, hi);
        if (std::abs(a2 - a2_old) < 1e-10 * (a2 + a2_old + 1e-10)) return false;
        const double a1 = a1_old + s * (a2_old - a2);

        const double d1 = a1 - a1_old;
        const double d2 = a2 - a2_old;
        const double b1 = b - e1 - y1 * d1 * k(i1, i1) - y2 * d2 * k(i1, i2);
        const double b2 = b - e2 - y1 * d1 * k(i1, i2) - y2 * d2 * k(i2, i2);
        if (a1 > 0.0 && a1 < C)
            b = b1;
        else if (a2 > 0.0 && a2 < C)
            b = b2;
        else
            b = (b1 + b2) / 2.0;

        alpha[i1] = a1;
        alpha[i2] = a2;
        for (std::size_t j = 0; j < n; ++j) {
            fcache[j] += y1 * d1 * k(i1, j) + y2 * d2 * k(i2, j);
        }
        return true;
    }

    bool is_non_bound(std::size_t i) const { return alpha[i] > 0.0 && alpha[i] < C; }

    bool examine(std::size_t i2) {
        const double r2 = error(i2) * y[i2];
        if (!((r2 < -tol && alpha[i2] < C) || (r2 > tol && alpha[i2] > 0.0))) return false;

        // heuristic 1: largest |E1 - E2| among non-bound points
        std::size_t best = n;
        double best_gap = -1.0;
        const double e2 = error(i2);
        for (std::size_t i = 0; i < n; ++i) {
            if (!is_non_bound(i)) continue;
            const double gap = std::abs(error(i) - e2);
            if (gap > best_gap) {
                best_gap = gap;
                best = i;
            }
        }
        if (best < n && take_step(best, i2)) return true;

        // heuristic 2: sweep non-bound points from a random start
        const std::size_t offset = rng.next_below(n);
        for (std::size_t c = 0; c < n; ++c) {
            const std::size_t i = (c + offset) % n;
            if (is_non_bound(i) && take_step(i, i2)) return true;
        }
        // heuristic 3: sweep everything
        for (std::size_t c = 0; c < n; ++c) {
            const std::size_t i = (c + offset) % n;
            if (take_step(i, i2)) return true;
        }
        return false;
    }

    void solve() {
        bool examine_all = true;
        int num_changed = 1;
        int passes = 0;
        while ((num_changed > 0 || examine_all) && passes < max_passes) {
            ++passes;
            num_changed = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (examine_all || is_non_bound(i)) num_changed += examine(i) ? 1 : 0;
            }
            if (examine_all)
                examine_all = false;
            else if (num_changed == 0)
                examine_all = true;
        }
    }
};

}  // namespace

double SvcModel::kernel_value(const double* a, const double* b) const {
    return kernel_eval(config.kernel, gamma, a, b, n_features);
}

double SvcModel::decision(int cls, const double* row) const {
    const BinaryProblem& problem = problems[static_cast<std::size_t>(cls)];
    double f = problem.bias;
    for (std::size_t s = 0; s < problem.sv_index.size(); ++s) {
        f += problem.alpha_y[s] * kernel_value(support_vectors[problem.sv_index[s]].data(), row);
    }
    return f;
}

int SvcModel::predict(const double* row) const {
    int best = 0;
    double best_value = decision(0, row);
    for (int c = 1; c < n_classes; ++c) {
        const double value = decision(c, row);
        if (value > best_value) {
            best_value = value;
            best = c;
        }
    }
    return best;
}

std::vector<int> SvcModel::predict_rows(const FeatureTable& table,
                                        const std::vector<std::size_t>& rows) const {
    std::vector<int> out(rows.size());
    parallel_chunks(rows.size(), 0, [&](int, std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) out[i] = predict(table.row_ptr(rows[i]));
    });
    return out;
}

SvcModel train_svc(const FeatureTable& table, const std::vector<std::size_t>& train_rows,
                   const SvcConfig& config) {
    if (train_rows.empty()) throw ValueError("cannot train an SVC on zero rows");

    std::vector<std::size_t> rows = train_rows;
    SvcModel model;
    model.config = config;
    if (rows.size() > config.max_train_rows) {
        Rng rng(derive_seed(config.seed, "svc-subsample"));
        rng.shuffle(rows);
        rows.resize(config.max_train_rows);
        model.subsampled = true;
    }
    const std::size_t n = rows.size();
    const std::size_t d = table.cols();
    model.n_classes = static_cast<int>(table.class_names.size());
    model.n_features = d;

    {
        std::set<int> present;
        for (const std::size_t r : rows) present.insert(table.labels[r]);
        if (present.size() < 2) throw ValueError("SVC training data holds a single class");
    }

    // gamma: scale = 1 / (d * Var(X)) over the training slice, auto = 1 / d
    switch (config.gamma_mode) {
        case GammaMode::value: model.gamma = config.gamma_value; break;
        case GammaMode::auto_mode: model.gamma = 1.0 / static_cast<double>(d); break;
        case GammaMode::scale: {
            double sum = 0.0, sum_sq = 0.0;
            const double count = static_cast<double>(n * d);
            for (const std::size_t r : rows) {
                for (std::size_t j = 0; j < d; ++j) {
                    const double v = table.at(r, j);
                    sum += v;
                    sum_sq += v * v;
                }
            }
            const double mean = sum / count;
            const double var = sum_sq / count - mean * mean;
            model.gamma = var > 0 ? 1.0 / (static_cast<double>(d) * var) : 1.0 / static_cast<double>(d);
            break;
        }
    }

    // shared Gram matrix (float to halve the footprint)
    std::vector<float> gram(n * n);
    parallel_chunks(n, 0, [&](int, std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const double* ri = table.row_ptr(rows[i]);
            for (std::size_t j = 0; j <= i; ++j) {
                const float kij = static_cast<float>(
                    kernel_eval(config.kernel, model.gamma, ri, table.row_ptr(rows[j]), d));
                gram[i * n + j] = kij;
                gram[j * n + i] = kij;
            }
        }
    });

    // one binary problem per class; support vectors pooled across problems
    std::vector<std::size_t> sv_slot(n, static_cast<std::size_t>(-1));
    for (int cls = 0; cls < model.n_classes; ++cls) {
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = table.labels[rows[i]] == cls ? 1.0 : -1.0;

        Rng rng(derive_seed(config.seed, "svc-class-" + std::to_string(cls)));
        Smo smo(gram, n, y, config.C, config.tol, config.max_passes, rng);
        smo.solve();

        SvcModel::BinaryProblem problem;
        problem.bias = smo.b;
        for (std::size_t i = 0; i < n; ++i) {
            if (smo.alpha[i] <= 1e-12) continue;
            if (sv_slot[i] == static_cast<std::size_t>(-1)) {
                sv_slot[i] = model.support_vectors.size();
                const double* src = table.row_ptr(rows[i]);
                model.support_vectors.emplace_back(src, src + d);
            }
            problem.sv_index.push_back(sv_slot[i]);
            problem.alpha_y.push_back(smo.alpha[i] * y[i]);
        }
        model.problems.push_back(std::move(problem));
    }
    return model;
}

double svc_max_kkt_violation(const SvcModel& model) {
    double worst = 0.0;
    for (int cls = 0; cls < model.n_classes; ++cls) {
        const SvcModel::BinaryProblem& problem = model.problems[static_cast<std::size_t>(cls)];
        for (std::size_t s = 0; s < problem.sv_index.size(); ++s) {
            const double* sv = model.support_vectors[problem.sv_index[s]].data();
            const double alpha = std::abs(problem.alpha_y[s]);
            const double y = problem.alpha_y[s] > 0 ? 1.0 : -1.0;
            const double margin = y * model.decision(cls, sv);
            double violation = 0.0;
            if (alpha < model.config.C - 1e-9) {
                violation = std::abs(margin - 1.0);  // non-bound: margin must sit at 1
            } else {
                violation = std::max(0.0, margin - 1.0);  // bound: margin at most 1
            }
            worst = std::max(worst, violation);
        }
    }
    return worst;
}

void save_svc(const SvcModel& model, const std::string& path) {
    nlohmann::json doc;
    doc["kernel"] = model.config.kernel == SvcKernel::rbf ? "rbf" : "poly";
    doc["gamma"] = model.gamma;
    doc["C"] = model.config.C;
    doc["n_classes"] = model.n_classes;
    doc["n_features"] = model.n_features;
    doc["subsampled"] = model.subsampled;
    doc["support_vectors"] = model.support_vectors;
    nlohmann::json problems = nlohmann::json::array();
    for (const auto& p : model.problems) {
        problems.push_back({{"sv_index", p.sv_index}, {"alpha_y", p.alpha_y}, {"bias", p.bias}});
    }
    doc["problems"] = std::move(problems);
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << doc.dump() << '\n';
}

SvcModel load_svc(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    nlohmann::json doc;
    in >> doc;
    SvcModel model;
    model.config.kernel = doc.at("kernel").get<std::string>() == "rbf" ? SvcKernel::rbf : SvcKernel::poly;
    model.gamma = doc.at("gamma").get<double>();
    model.config.C = doc.at("C").get<double>();
    model.n_classes = doc.at("n_classes").get<int>();
    model.n_features = doc.at("n_features").get<std::size_t>();
    model.subsampled = doc.at("subsampled").get<bool>();
    model.support_vectors = doc.at("support_vectors").get<std::vector<std::vector<double>>>();
    for (const auto& p : doc.at("problems")) {
        SvcModel::BinaryProblem problem;
        problem.sv_index = p.at("sv_index").get<std::vector<std::size_t>>();
        problem.alpha_y = p.at("alpha_y").get<std::vector<double>>();
        problem.bias = p.at("bias").get<double>();
        model.problems.push_back(std::move(problem));
    }
    return model;
}

}  // namespace featcode
