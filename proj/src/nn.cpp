#include "featcode/nn.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include <json.hpp>

namespace featcode {

CnnModel<float> build_cnn(const CnnConfig& config) {
    CnnModel<float> model(config);
    model.init_weights(0);
    return model;
}

namespace {

struct BatchStats {
    double loss_sum = 0.0;
    std::size_t correct = 0;
    std::size_t count = 0;
};

int argmax_label(const float* probs, int k) {
    int best = 0;
    for (int i = 1; i < k; ++i) {
        if (probs[i] > probs[best]) best = i;  // strict: ties keep the lower index
    }
    return best;
}

// Deterministic per-thread gradient accumulation reduced in thread order.
BatchStats run_batch(const CnnModel<float>& model, const ImageBatch& batch,
                     const std::vector<std::size_t>& order, std::size_t begin, std::size_t end,
                     int threads, std::vector<CnnModel<float>::Workspace>& workspaces,
                     std::vector<std::vector<std::vector<double>>>& thread_grads,
                     std::vector<std::vector<double>>& grads) {
    const std::size_t n = end - begin;
    std::vector<BatchStats> stats(thread_grads.size());
    parallel_chunks(n, threads, [&](int t, std::size_t lo, std::size_t hi) {
        auto& my_grads = thread_grads[static_cast<std::size_t>(t)];
        for (auto& g : my_grads) std::fill(g.begin(), g.end(), 0.0);
        auto& ws = workspaces[static_cast<std::size_t>(t)];
        BatchStats& my_stats = stats[static_cast<std::size_t>(t)];
        for (std::size_t i = lo; i < hi; ++i) {
            const std::size_t row = order[begin + i];
            const double loss =
                model.backward(batch.image(row), batch.labels[row], ws, my_grads);
            my_stats.loss_sum += loss;
            my_stats.correct +=
                argmax_label(ws.probs.data(), model.config.n_classes) == batch.labels[row] ? 1 : 0;
            my_stats.count += 1;
        }
    });

    for (auto& g : grads) std::fill(g.begin(), g.end(), 0.0);
    BatchStats total;
    for (std::size_t t = 0; t < thread_grads.size(); ++t) {
        if (stats[t].count == 0) continue;
        for (std::size_t p = 0; p < grads.size(); ++p) {
            for (std::size_t i = 0; i < grads[p].size(); ++i) grads[p][i] += thread_grads[t][p][i];
        }
        total.loss_sum += stats[t].loss_sum;
        total.correct += stats[t].correct;
        total.count += stats[t].count;
    }
    const double scale = total.count > 0 ? 1.0 / static_cast<double>(total.count) : 0.0;
    for (auto& g : grads) {
        for (double& v : g) v *= scale;
    }
    return total;
}

BatchStats evaluate_rows(const CnnModel<float>& model, const ImageBatch& batch,
                         const std::vector<std::size_t>& rows, int threads,
                         std::vector<CnnModel<float>::Workspace>& workspaces) {
    std::vector<BatchStats> stats(workspaces.size());
    parallel_chunks(rows.size(), threads, [&](int t, std::size_t lo, std::size_t hi) {
        auto& ws = workspaces[static_cast<std::size_t>(t)];
        BatchStats& my_stats = stats[static_cast<std::size_t>(t)];
        for (std::size_t i = lo; i < hi; ++i) {
            const std::size_t row = rows[i];
            const float* logits = model.forward(batch.image(row), ws);
            const double loss = softmax_cross_entropy(logits, model.config.n_classes,
                                                      batch.labels[row], ws.probs.data());
            my_stats.loss_sum += loss;
            my_stats.correct +=
                argmax_label(ws.probs.data(), model.config.n_classes) == batch.labels[row] ? 1 : 0;
            my_stats.count += 1;
        }
    });
    BatchStats total;
    for (const BatchStats& s : stats) {
        total.loss_sum += s.loss_sum;
        total.correct += s.correct;
        total.count += s.count;
    }
    return total;
}

}  // namespace

TrainHistory train_cnn(CnnModel<float>& model, const ImageBatch& batch, const SplitIndices& split,
                       const TrainConfig& cfg) {
    if (split.train.empty()) throw ValueError("training split is empty");
    if (batch.dim != model.config.input_dim)
        throw ShapeError("model expects " + std::to_string(model.config.input_dim) +
                         "-pixel images, batch holds " + std::to_string(batch.dim));
    if (cfg.batch_size < 1 || cfg.epochs < 1 || cfg.lr <= 0)
        throw ValueError("invalid training configuration");

    const int threads = resolve_threads(cfg.threads);
    std::vector<CnnModel<float>::Workspace> workspaces;
    std::vector<std::vector<std::vector<double>>> thread_grads;
    for (int t = 0; t < threads; ++t) {
        workspaces.emplace_back(model);
        thread_grads.push_back(model.make_grad_buffers());
    }
    std::vector<std::vector<double>> grads = model.make_grad_buffers();

    // optimizer moments
    std::vector<std::vector<double>> m_buf = model.make_grad_buffers();
    std::vector<std::vector<double>> v_buf = model.make_grad_buffers();
    OptimizerConfig opt;
    opt.kind = cfg.optimizer;
    opt.lr = cfg.lr;

    const bool has_validation = !split.validation.empty();
    TrainHistory history;
    std::vector<std::vector<float>> best_params = model.params;
    double best_monitored = std::numeric_limits<double>::infinity();
    int epochs_without_improvement = 0;

    Rng shuffle_rng(derive_seed(cfg.seed, "epoch-shuffle"));
    std::vector<std::size_t> order = split.train;
    std::int64_t step = 0;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        BatchStats epoch_stats;
        for (std::size_t begin = 0; begin < order.size();
             begin += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t end =
                std::min(order.size(), begin + static_cast<std::size_t>(cfg.batch_size));
            const BatchStats s =
                run_batch(model, batch, order, begin, end, threads, workspaces, thread_grads, grads);
            epoch_stats.loss_sum += s.loss_sum;
            epoch_stats.correct += s.correct;
            epoch_stats.count += s.count;
            ++step;
            for (std::size_t p = 0; p < model.params.size(); ++p) {
                optimizer_step(opt, step, grads[p].data(), grads[p].size(),
                               model.params[p].data(), m_buf[p].data(), v_buf[p].data());
            }
        }

        EpochStats stats;
        stats.train_loss = epoch_stats.loss_sum / static_cast<double>(epoch_stats.count);
        stats.train_acc =
            static_cast<double>(epoch_stats.correct) / static_cast<double>(epoch_stats.count);
        if (has_validation) {
            const BatchStats v = evaluate_rows(model, batch, split.validation, threads, workspaces);
            stats.val_loss = v.loss_sum / static_cast<double>(v.count);
            stats.val_acc = static_cast<double>(v.correct) / static_cast<double>(v.count);
        } else {
            stats.val_loss = std::numeric_limits<double>::quiet_NaN();
            stats.val_acc = std::numeric_limits<double>::quiet_NaN();
        }
        history.epochs.push_back(stats);

        const double monitored = has_validation ? stats.val_loss : stats.train_loss;
        if (monitored < best_monitored) {
            best_monitored = monitored;
            best_params = model.params;
            history.best_epoch = epoch;
            epochs_without_improvement = 0;
        } else if (cfg.patience > 0) {
            ++epochs_without_improvement;
            if (epochs_without_improvement >= cfg.patience) {
                history.early_stopped = true;
                break;
            }
        }
    }

    model.params = best_params;  // restore best-epoch weights
    return history;
}

std::pair<Tensor<float>, std::vector<int>> predict(const CnnModel<float>& model,
                                                   const ImageBatch& batch,
                                                   const std::vector<std::size_t>& rows,
                                                   int threads) {
    std::vector<std::size_t> all;
    const std::vector<std::size_t>* selected = &rows;
    if (rows.empty()) {
        all.resize(batch.count());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        selected = &all;
    }
    if (batch.dim != model.config.input_dim)
        throw ShapeError("model expects " + std::to_string(model.config.input_dim) +
                         "-pixel images, batch holds " + std::to_string(batch.dim));

    const int k = model.config.n_classes;
    Tensor<float> probs({selected->size(), static_cast<std::size_t>(k)});
    std::vector<int> labels(selected->size());
    const int t = resolve_threads(threads);
    std::vector<CnnModel<float>::Workspace> workspaces;
    for (int i = 0; i < t; ++i) workspaces.emplace_back(model);

    parallel_chunks(selected->size(), t, [&](int w, std::size_t lo, std::size_t hi) {
        auto& ws = workspaces[static_cast<std::size_t>(w)];
        for (std::size_t i = lo; i < hi; ++i) {
            const float* logits = model.forward(batch.image((*selected)[i]), ws);
            softmax_cross_entropy(logits, k, 0, ws.probs.data());
            std::copy(ws.probs.begin(), ws.probs.end(),
                      probs.data.begin() + i * static_cast<std::size_t>(k));
            labels[i] = argmax_label(ws.probs.data(), k);
        }
    });
    return {std::move(probs), std::move(labels)};
}

double grad_check(CnnModel<double>& model, const std::vector<double>& image, int label,
                  double eps) {
    if (image.size() != model.input_pixels()) throw ShapeError("image size mismatch");

    CnnModel<double>::Workspace ws(model);
    std::vector<std::vector<double>> grads = model.make_grad_buffers();
    model.backward(image.data(), label, ws, grads);

    auto loss_at = [&]() {
        const double* logits = model.forward(image.data(), ws);
        return softmax_cross_entropy(logits, model.config.n_classes, label, ws.probs.data());
    };

    double max_rel_error = 0.0;
    for (std::size_t p = 0; p < model.params.size(); ++p) {
        for (std::size_t i = 0; i < model.params[p].size(); ++i) {
            const double saved = model.params[p][i];
            model.params[p][i] = saved + eps;
            const double loss_plus = loss_at();
            model.params[p][i] = saved - eps;
            const double loss_minus = loss_at();
            model.params[p][i] = saved;
            const double numeric = (loss_plus - loss_minus) / (2.0 * eps);
            const double analytic = grads[p][i];
            const double rel = std::abs(analytic - numeric) /
                               std::max({std::abs(analytic), std::abs(numeric), 1e-8});
            max_rel_error = std::max(max_rel_error, rel);
        }
    }
    return max_rel_error;
}

namespace {

void write_f32le(std::ofstream& out, float value) {
    std::uint32_t bits;
    std::memcpy(&bits, &value, 4);
    const char bytes[4] = {static_cast<char>(bits & 0xFF), static_cast<char>((bits >> 8) & 0xFF),
                           static_cast<char>((bits >> 16) & 0xFF),
                           static_cast<char>((bits >> 24) & 0xFF)};
    out.write(bytes, 4);
}

float read_f32le(std::ifstream& in) {
    unsigned char bytes[4];
    in.read(reinterpret_cast<char*>(bytes), 4);
    const std::uint32_t bits = static_cast<std::uint32_t>(bytes[0]) |
                               (static_cast<std::uint32_t>(bytes[1]) << 8) |
                               (static_cast<std::uint32_t>(bytes[2]) << 16) |
                               (static_cast<std::uint32_t>(bytes[3]) << 24);
    float value;
    std::memcpy(&value, &bits, 4);
    return value;
}

const char* optimizer_name(OptimizerKind kind) {
    switch (kind) {
        case OptimizerKind::adam: return "adam";
        case OptimizerKind::nadam: return "nadam";
        case OptimizerKind::rmsprop: return "rmsprop";
    }
    return "adam";
}

}  // namespace

void save_model(const CnnModel<float>& model, const TrainHistory& history, const TrainConfig& cfg,
                const std::string& stem) {
    nlohmann::json doc;
    doc["architecture"]["input_dim"] = model.config.input_dim;
    doc["architecture"]["n_classes"] = model.config.n_classes;
    doc["architecture"]["conv_channels"] = model.config.conv_channels;
    doc["architecture"]["dense_hidden"] = model.config.resolved_dense_hidden();
    std::vector<std::size_t> tensor_sizes;
    for (const auto& p : model.params) tensor_sizes.push_back(p.size());
    doc["weights"]["tensor_sizes"] = tensor_sizes;
    doc["training"]["lr"] = cfg.lr;
    doc["training"]["batch_size"] = cfg.batch_size;
    doc["training"]["epochs"] = cfg.epochs;
    doc["training"]["optimizer"] = optimizer_name(cfg.optimizer);
    doc["training"]["patience"] = cfg.patience;
    doc["training"]["seed"] = cfg.seed;
    doc["history"]["best_epoch"] = history.best_epoch;
    doc["history"]["early_stopped"] = history.early_stopped;
    nlohmann::json epochs = nlohmann::json::array();
    for (const EpochStats& e : history.epochs) {
        nlohmann::json row;
        row["train_loss"] = e.train_loss;
        row["train_acc"] = e.train_acc;
        if (!std::isnan(e.val_loss)) {
            row["val_loss"] = e.val_loss;
            row["val_acc"] = e.val_acc;
        }
        epochs.push_back(row);
    }
    doc["history"]["epochs"] = epochs;

    {
        std::ofstream out(stem + ".json");
        if (!out) throw IoError("cannot open '" + stem + ".json' for writing");
        out << doc.dump(2) << '\n';
    }
    {
        std::ofstream out(stem + ".weights", std::ios::binary);
        if (!out) throw IoError("cannot open '" + stem + ".weights' for writing");
        for (const auto& p : model.params) {
            for (const float v : p) write_f32le(out, v);
        }
        if (!out) throw IoError("write failure on '" + stem + ".weights'");
    }
    {
        std::ofstream out(stem + ".history.csv");
        if (!out) throw IoError("cannot open '" + stem + ".history.csv' for writing");
        out << "epoch,train_loss,train_acc,val_loss,val_acc\n";
        for (std::size_t i = 0; i < history.epochs.size(); ++i) {
            const EpochStats& e = history.epochs[i];
            out << i << ',' << e.train_loss << ',' << e.train_acc << ',';
            if (std::isnan(e.val_loss))
                out << ",";
            else
                out << e.val_loss << ',' << e.val_acc;
            out << '\n';
        }
    }
}

CnnModel<float> load_model(const std::string& stem) {
    nlohmann::json doc;
    {
        std::ifstream in(stem + ".json");
        if (!in) throw IoError("cannot open '" + stem + ".json' for reading");
        in >> doc;
    }
    CnnConfig config;
    config.input_dim = doc.at("architecture").at("input_dim").get<int>();
    config.n_classes = doc.at("architecture").at("n_classes").get<int>();
    config.conv_channels = doc.at("architecture").at("conv_channels").get<std::vector<int>>();
    config.dense_hidden = doc.at("architecture").at("dense_hidden").get<std::vector<int>>();
    CnnModel<float> model(config);

    const auto sizes = doc.at("weights").at("tensor_sizes").get<std::vector<std::size_t>>();
    if (sizes.size() != model.params.size())
        throw SchemaError("weight manifest disagrees with architecture for '" + stem + "'");
    std::ifstream in(stem + ".weights", std::ios::binary);
    if (!in) throw IoError("cannot open '" + stem + ".weights' for reading");
    for (std::size_t p = 0; p < model.params.size(); ++p) {
        if (sizes[p] != model.params[p].size())
            throw SchemaError("weight tensor size mismatch in '" + stem + "'");
        for (float& v : model.params[p]) v = read_f32le(in);
    }
    if (!in) throw IoError("truncated weights in '" + stem + ".weights'");
    return model;
}

}  // namespace featcode
