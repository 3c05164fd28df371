#include "featcode/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "featcode/errors.hpp"
#include "featcode/nn.hpp"

namespace featcode {

namespace {

struct Activations {
    std::vector<std::vector<float>> post;  // post-relu per layer (logits for the last)
    std::vector<std::vector<float>> grad;
    std::vector<float> probs;
};

void forward_mlp(const MlpModel& model, const float* input, Activations& act) {
    const float* current = input;
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        dense_forward(current, model.layer_sizes[l], model.weights[l].data(),
                      model.biases[l].data(), model.layer_sizes[l + 1], act.post[l].data());
        if (l + 1 < model.weights.size())
            relu_forward(act.post[l].data(), act.post[l].size(), act.post[l].data());
        current = act.post[l].data();
    }
}

}  // namespace

int MlpModel::predict(const double* row) const {
    std::vector<float> input(static_cast<std::size_t>(layer_sizes.front()));
    for (std::size_t j = 0; j < input.size(); ++j) input[j] = static_cast<float>(row[j]);
    Activations act;
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l)
        act.post.emplace_back(static_cast<std::size_t>(layer_sizes[l + 1]));
    forward_mlp(*this, input.data(), act);
    const std::vector<float>& logits = act.post.back();
    int best = 0;
    for (std::size_t c = 1; c < logits.size(); ++c) {
        if (logits[c] > logits[static_cast<std::size_t>(best)]) best = static_cast<int>(c);
    }
    return best;
}

std::vector<int> MlpModel::predict_rows(const FeatureTable& table,
                                        const std::vector<std::size_t>& rows) const {
    std::vector<int> out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) out[i] = predict(table.row_ptr(rows[i]));
    return out;
}

MlpModel train_mlp(const FeatureTable& table, const std::vector<std::size_t>& train_rows,
                   const MlpConfig& config) {
    if (config.hidden_sizes.empty()) throw ValueError("MLP requires at least one hidden layer");
    if (train_rows.empty()) throw ValueError("cannot train an MLP on zero rows");

    MlpModel model;
    model.config = config;
    model.layer_sizes.push_back(static_cast<int>(table.cols()));
    for (const int h : config.hidden_sizes) {
        if (h < 1) throw ValueError("hidden layer width must be >= 1");
        model.layer_sizes.push_back(h);
    }
    model.layer_sizes.push_back(static_cast<int>(table.class_names.size()));

    Rng rng(derive_seed(config.seed, "mlp-init"));
    const std::size_t n_layers = model.layer_sizes.size() - 1;
    for (std::size_t l = 0; l < n_layers; ++l) {
        const int in_n = model.layer_sizes[l];
        const int out_n = model.layer_sizes[l + 1];
        const double limit = std::sqrt(6.0 / in_n);
        model.weights.emplace_back(static_cast<std::size_t>(in_n) * out_n);
        for (float& w : model.weights.back())
            w = static_cast<float>((rng.next_unit() * 2.0 - 1.0) * limit);
        model.biases.emplace_back(static_cast<std::size_t>(out_n), 0.0f);
    }

    // gradient and moment buffers mirror the parameter layout
    std::vector<std::vector<double>> dw(n_layers), db(n_layers);
    std::vector<std::vector<double>> mw(n_layers), vw(n_layers), mb(n_layers), vb(n_layers);
    for (std::size_t l = 0; l < n_layers; ++l) {
        dw[l].assign(model.weights[l].size(), 0.0);
        db[l].assign(model.biases[l].size(), 0.0);
        mw[l].assign(model.weights[l].size(), 0.0);
        vw[l].assign(model.weights[l].size(), 0.0);
        mb[l].assign(model.biases[l].size(), 0.0);
        vb[l].assign(model.biases[l].size(), 0.0);
    }

    Activations act;
    for (std::size_t l = 0; l < n_layers; ++l) {
        act.post.emplace_back(static_cast<std::size_t>(model.layer_sizes[l + 1]));
        act.grad.emplace_back(static_cast<std::size_t>(model.layer_sizes[l + 1]));
    }
    act.probs.resize(static_cast<std::size_t>(model.layer_sizes.back()));
    std::vector<float> input(table.cols());
    std::vector<float> din_input(table.cols());  // unused gradient w.r.t. the input

    const std::size_t batch =
        config.batch_size > 0 ? static_cast<std::size_t>(config.batch_size)
                              : std::min<std::size_t>(200, train_rows.size());
    OptimizerConfig opt;
    opt.lr = config.lr;

    Rng shuffle_rng(derive_seed(config.seed, "mlp-shuffle"));
    std::vector<std::size_t> order = train_rows;
    std::int64_t step = 0;

    for (int epoch = 0; epoch < config.max_iter; ++epoch) {
        shuffle_rng.shuffle(order);
        for (std::size_t begin = 0; begin < order.size(); begin += batch) {
            const std::size_t end = std::min(order.size(), begin + batch);
            for (std::size_t l = 0; l < n_layers; ++l) {
                std::fill(dw[l].begin(), dw[l].end(), 0.0);
                std::fill(db[l].begin(), db[l].end(), 0.0);
            }
            for (std::size_t i = begin; i < end; ++i) {
                const std::size_t row = order[i];
                for (std::size_t j = 0; j < table.cols(); ++j)
                    input[j] = static_cast<float>(table.at(row, j));
                forward_mlp(model, input.data(), act);
                softmax_cross_entropy(act.post.back().data(), model.layer_sizes.back(),
                                      table.labels[row], act.probs.data(),
                                      act.grad.back().data());
                const float* grad_above = act.grad.back().data();
                for (std::size_t l = n_layers; l-- > 0;) {
                    if (l + 1 < n_layers) {
                        relu_backward(act.post[l].data(), grad_above, act.post[l].size(),
                                      act.grad[l].data());
                        grad_above = act.grad[l].data();
                    }
                    const float* layer_in = l == 0 ? input.data() : act.post[l - 1].data();
                    float* din = l == 0 ? din_input.data() : act.grad[l - 1].data();
                    dense_backward(layer_in, model.layer_sizes[l], model.weights[l].data(),
                                   model.layer_sizes[l + 1], grad_above, din, dw[l].data(),
                                   db[l].data());
                    grad_above = din;
                }
            }
            const double scale = 1.0 / static_cast<double>(end - begin);
            ++step;
            for (std::size_t l = 0; l < n_layers; ++l) {
                for (double& g : dw[l]) g *= scale;
                for (double& g : db[l]) g *= scale;
                if (config.solver == MlpSolver::adam) {
                    optimizer_step(opt, step, dw[l].data(), dw[l].size(), model.weights[l].data(),
                                   mw[l].data(), vw[l].data());
                    optimizer_step(opt, step, db[l].data(), db[l].size(), model.biases[l].data(),
                                   mb[l].data(), vb[l].data());
                } else {
                    for (std::size_t i = 0; i < dw[l].size(); ++i)
                        model.weights[l][i] -= static_cast<float>(config.lr * dw[l][i]);
                    for (std::size_t i = 0; i < db[l].size(); ++i)
                        model.biases[l][i] -= static_cast<float>(config.lr * db[l][i]);
                }
            }
        }
    }
    return model;
}

void save_mlp(const MlpModel& model, const std::string& path) {
    nlohmann::json doc;
    doc["layer_sizes"] = model.layer_sizes;
    doc["weights"] = model.weights;
    doc["biases"] = model.biases;
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << doc.dump() << '\n';
}

MlpModel load_mlp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    nlohmann::json doc;
    in >> doc;
    MlpModel model;
    model.layer_sizes = doc.at("layer_sizes").get<std::vector<int>>();
    model.weights = doc.at("weights").get<std::vector<std::vector<float>>>();
    model.biases = doc.at("biases").get<std::vector<std::vector<float>>>();
    return model;
}

}  // namespace featcode
