#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "featcode/errors.hpp"
#include "featcode/feature_table.hpp"
#include "featcode/parallel.hpp"
#include "featcode/rng.hpp"

namespace featcode {

/// Flat n-dimensional array, row-major.
template <typename T>
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<T> data;

    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> s) : shape(std::move(s)) {
        data.assign(numel_of(shape), T{});
    }

    static std::size_t numel_of(const std::vector<std::size_t>& s) {
        std::size_t n = 1;
        for (const std::size_t d : s) n *= d;
        return n;
    }
    std::size_t numel() const { return data.size(); }
};

/*---- layer kernels ----
 * Activations are [H, W, C] row-major with channels fastest; conv kernels
 * are [3, 3, Cin, Cout] with Cout fastest. Reductions accumulate in double
 * regardless of T.
 */

template <typename T>
void conv2d_forward(const T* in, int h, int w, int cin, const T* weight, const T* bias, int cout,
                    T* out, double* acc_scratch) {
    const int oh = h - 2;
    const int ow = w - 2;
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            double* acc = acc_scratch;
            for (int co = 0; co < cout; ++co) acc[co] = bias[co];
            for (int ky = 0; ky < 3; ++ky) {
                const T* ip = in + (static_cast<std::size_t>(y + ky) * w + x) * cin;
                const T* wp = weight + static_cast<std::size_t>(ky) * 3 * cin * cout;
                for (int kx = 0; kx < 3; ++kx) {
                    const T* ipx = ip + static_cast<std::size_t>(kx) * cin;
                    const T* wpx = wp + static_cast<std::size_t>(kx) * cin * cout;
                    for (int ci = 0; ci < cin; ++ci) {
                        const double v = ipx[ci];
                        const T* wr = wpx + static_cast<std::size_t>(ci) * cout;
                        for (int co = 0; co < cout; ++co) acc[co] += v * static_cast<double>(wr[co]);
                    }
                }
            }
            T* op = out + (static_cast<std::size_t>(y) * ow + x) * cout;
            for (int co = 0; co < cout; ++co) op[co] = static_cast<T>(acc[co]);
        }
    }
}

template <typename T>
void conv2d_backward(const T* in, int h, int w, int cin, const T* weight, int cout, const T* dout,
                     T* din, double* dweight, double* dbias) {
    const int oh = h - 2;
    const int ow = w - 2;
    std::fill(din, din + static_cast<std::size_t>(h) * w * cin, T{});
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            const T* dop = dout + (static_cast<std::size_t>(y) * ow + x) * cout;
            for (int co = 0; co < cout; ++co) dbias[co] += dop[co];
            for (int ky = 0; ky < 3; ++ky) {
                for (int kx = 0; kx < 3; ++kx) {
                    const std::size_t base = (static_cast<std::size_t>(y + ky) * w + (x + kx)) *
                                             static_cast<std::size_t>(cin);
                    const T* ip = in + base;
                    T* dip = din + base;
                    const std::size_t wbase =
                        (static_cast<std::size_t>(ky) * 3 + kx) * static_cast<std::size_t>(cin) * cout;
                    const T* wp = weight + wbase;
                    double* dwp = dweight + wbase;
                    for (int ci = 0; ci < cin; ++ci) {
                        const double v = ip[ci];
                        const T* wr = wp + static_cast<std::size_t>(ci) * cout;
                        double* dwr = dwp + static_cast<std::size_t>(ci) * cout;
                        double s = 0.0;
                        for (int co = 0; co < cout; ++co) {
                            const double g = dop[co];
                            s += static_cast<double>(wr[co]) * g;
                            dwr[co] += v * g;
                        }
                        dip[ci] += static_cast<T>(s);
                    }
                }
            }
        }
    }
}

template <typename T>
void relu_forward(const T* in, std::size_t n, T* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = in[i] > T{} ? in[i] : T{};
}

template <typename T>
void relu_backward(const T* out, const T* dout, std::size_t n, T* din) {
    for (std::size_t i = 0; i < n; ++i) din[i] = out[i] > T{} ? dout[i] : T{};
}

/// 2x2 stride-2 max pooling with floor semantics (odd trailing row/column
/// dropped). argmax records the winning offset (0..3) per output cell; ties
/// go to the first element in row-major window order.
template <typename T>
void maxpool2_forward(const T* in, int h, int w, int c, T* out, std::uint8_t* argmax) {
    const int oh = h / 2;
    const int ow = w / 2;
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            const T* i00 = in + (static_cast<std::size_t>(2 * y) * w + 2 * x) * c;
            const T* i01 = i00 + c;
            const T* i10 = i00 + static_cast<std::size_t>(w) * c;
            const T* i11 = i10 + c;
            T* op = out + (static_cast<std::size_t>(y) * ow + x) * c;
            std::uint8_t* ap = argmax + (static_cast<std::size_t>(y) * ow + x) * c;
            for (int ch = 0; ch < c; ++ch) {
                T best = i00[ch];
                std::uint8_t which = 0;
                if (i01[ch] > best) { best = i01[ch]; which = 1; }
                if (i10[ch] > best) { best = i10[ch]; which = 2; }
                if (i11[ch] > best) { best = i11[ch]; which = 3; }
                op[ch] = best;
                ap[ch] = which;
            }
        }
    }
}

template <typename T>
void maxpool2_backward(const T* dout, const std::uint8_t* argmax, int h, int w, int c, T* din) {
    const int oh = h / 2;
    const int ow = w / 2;
    std::fill(din, din + static_cast<std::size_t>(h) * w * c, T{});
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            const T* dop = dout + (static_cast<std::size_t>(y) * ow + x) * c;
            const std::uint8_t* ap = argmax + (static_cast<std::size_t>(y) * ow + x) * c;
            T* base = din + (static_cast<std::size_t>(2 * y) * w + 2 * x) * c;
            for (int ch = 0; ch < c; ++ch) {
                const std::uint8_t which = ap[ch];
                const std::size_t offset =
                    (which & 2 ? static_cast<std::size_t>(w) * c : 0) + (which & 1 ? c : 0);
                base[offset + static_cast<std::size_t>(ch)] += dop[ch];
            }
        }
    }
}

template <typename T>
void dense_forward(const T* in, int n, const T* weight, const T* bias, int m, T* out) {
    for (int j = 0; j < m; ++j) {
        double acc = bias[j];
        const T* wcol = weight + j;
        for (int i = 0; i < n; ++i) {
            acc += static_cast<double>(in[i]) *
                   static_cast<double>(wcol[static_cast<std::size_t>(i) * m]);
        }
        out[j] = static_cast<T>(acc);
    }
}

template <typename T>
void dense_backward(const T* in, int n, const T* weight, int m, const T* dout, T* din,
                    double* dweight, double* dbias) {
    for (int j = 0; j < m; ++j) dbias[j] += dout[j];
    for (int i = 0; i < n; ++i) {
        const double v = in[i];
        const T* wr = weight + static_cast<std::size_t>(i) * m;
        double* dwr = dweight + static_cast<std::size_t>(i) * m;
        double s = 0.0;
        for (int j = 0; j < m; ++j) {
            const double g = dout[j];
            s += static_cast<double>(wr[j]) * g;
            dwr[j] += v * g;
        }
        din[i] = static_cast<T>(s);
    }
}

/// Numerically stabilized softmax + cross-entropy. Returns the loss and
/// fills probs; grad_logits (optional) receives probs - onehot.
template <typename T>
double softmax_cross_entropy(const T* logits, int k, int true_class, T* probs,
                             T* grad_logits = nullptr) {
    double max_logit = logits[0];
    for (int i = 1; i < k; ++i) max_logit = std::max(max_logit, static_cast<double>(logits[i]));
    double sum = 0.0;
    for (int i = 0; i < k; ++i) sum += std::exp(static_cast<double>(logits[i]) - max_logit);
    const double log_sum = std::log(sum);
    double loss = 0.0;
    for (int i = 0; i < k; ++i) {
        const double logp = static_cast<double>(logits[i]) - max_logit - log_sum;
        const double p = std::exp(logp);
        probs[i] = static_cast<T>(p);
        if (i == true_class) loss = -logp;
        if (grad_logits) grad_logits[i] = static_cast<T>(p - (i == true_class ? 1.0 : 0.0));
    }
    return loss;
}

/*---- optimizers ----*/

enum class OptimizerKind { adam, nadam, rmsprop };

struct OptimizerConfig {
    OptimizerKind kind = OptimizerKind::adam;
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// One update over a parameter tensor. m/v are the first/second moment
/// buffers (v only for adam variants and rmsprop), t is the 1-based step.
template <typename T>
void optimizer_step(const OptimizerConfig& cfg, std::int64_t t, const double* grad, std::size_t n,
                    T* param, double* m, double* v) {
    switch (cfg.kind) {
        case OptimizerKind::adam: {
            const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
            const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
            for (std::size_t i = 0; i < n; ++i) {
                const double g = grad[i];
                m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
                v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
                const double mhat = m[i] / bc1;
                const double vhat = v[i] / bc2;
                param[i] = static_cast<T>(param[i] - cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps));
            }
            break;
        }
        case OptimizerKind::nadam: {
            // Nesterov momentum folded into the Adam update (Dozat 2016)
            const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
            const double bc1_next = 1.0 - std::pow(cfg.beta1, static_cast<double>(t + 1));
            const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
            for (std::size_t i = 0; i < n; ++i) {
                const double g = grad[i];
                m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
                v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
                const double mbar =
                    cfg.beta1 * m[i] / bc1_next + (1.0 - cfg.beta1) * g / bc1;
                const double vhat = v[i] / bc2;
                param[i] = static_cast<T>(param[i] - cfg.lr * mbar / (std::sqrt(vhat) + cfg.eps));
            }
            break;
        }
        case OptimizerKind::rmsprop: {
            for (std::size_t i = 0; i < n; ++i) {
                const double g = grad[i];
                v[i] = 0.9 * v[i] + 0.1 * g * g;
                param[i] = static_cast<T>(param[i] - cfg.lr * g / (std::sqrt(v[i]) + cfg.eps));
            }
            break;
        }
    }
}

/*---- model ----*/

struct CnnConfig {
    int input_dim = 128;
    int n_classes = 4;
    std::vector<int> conv_channels = {32, 64, 128, 256, 512};  // one conv+relu+pool stage each
    std::vector<int> dense_hidden;  // empty = derived from input_dim (128,64 / 256,64)

    std::vector<int> resolved_dense_hidden() const {
        if (!dense_hidden.empty()) return dense_hidden;
        return input_dim >= 256 ? std::vector<int>{256, 64} : std::vector<int>{128, 64};
    }
};

struct TrainConfig {
    double lr = 0.001;
    int batch_size = 64;
    int epochs = 5;
    OptimizerKind optimizer = OptimizerKind::adam;
    int patience = 2;  // early-stopping epochs without improvement; 0 disables
    std::uint64_t seed = 0;
    int threads = 0;  // 0 = hardware concurrency
};

struct EpochStats {
    double train_loss = 0.0;
    double train_acc = 0.0;
    double val_loss = 0.0;  // NaN when no validation split
    double val_acc = 0.0;
};

struct TrainHistory {
    std::vector<EpochStats> epochs;
    int best_epoch = -1;
    bool early_stopped = false;
};

template <typename T>
class CnnModel {
public:
    struct ConvStage {
        int in_h, in_w, in_c, out_c;
        int conv_h, conv_w;  // after 3x3 valid conv
        int pool_h, pool_w;  // after 2x2 floor pooling
    };
    struct DenseStage {
        int in_n, out_n;
        bool relu;
    };

    CnnConfig config;
    std::vector<ConvStage> conv_stages;
    std::vector<DenseStage> dense_stages;
    int flatten_n = 0;

    // parameter tensors, ordered: (conv w, conv b) per stage, then (dense w, dense b)
    std::vector<std::vector<T>> params;

    explicit CnnModel(const CnnConfig& cfg) : config(cfg) {
        int h = cfg.input_dim;
        int w = cfg.input_dim;
        int c = 1;
        if (cfg.conv_channels.empty()) throw ShapeError("at least one conv stage required");
        for (std::size_t s = 0; s < cfg.conv_channels.size(); ++s) {
            ConvStage stage;
            stage.in_h = h;
            stage.in_w = w;
            stage.in_c = c;
            stage.out_c = cfg.conv_channels[s];
            if (h < 3 || w < 3)
                throw ShapeError("conv stage " + std::to_string(s + 1) + " input " +
                                 std::to_string(h) + "x" + std::to_string(w) +
                                 " is smaller than the 3x3 kernel");
            stage.conv_h = h - 2;
            stage.conv_w = w - 2;
            stage.pool_h = stage.conv_h / 2;
            stage.pool_w = stage.conv_w / 2;
            if (stage.pool_h < 1 || stage.pool_w < 1)
                throw ShapeError("pool stage " + std::to_string(s + 1) +
                                 " collapses below one cell");
            conv_stages.push_back(stage);
            h = stage.pool_h;
            w = stage.pool_w;
            c = stage.out_c;
        }
        flatten_n = h * w * c;

        int n = flatten_n;
        for (const int width : cfg.resolved_dense_hidden()) {
            if (width < 1) throw ShapeError("dense layer width must be >= 1");
            dense_stages.push_back({n, width, true});
            n = width;
        }
        if (cfg.n_classes < 2) throw ShapeError("need at least 2 classes");
        dense_stages.push_back({n, cfg.n_classes, false});

        for (const ConvStage& s : conv_stages) {
            params.emplace_back(static_cast<std::size_t>(9) * s.in_c * s.out_c);
            params.emplace_back(static_cast<std::size_t>(s.out_c));
        }
        for (const DenseStage& s : dense_stages) {
            params.emplace_back(static_cast<std::size_t>(s.in_n) * s.out_n);
            params.emplace_back(static_cast<std::size_t>(s.out_n));
        }
    }

    /// He-uniform fan-in init for weights, zero biases.
    void init_weights(std::uint64_t seed) {
        Rng rng(derive_seed(seed, "weight-init"));
        std::size_t p = 0;
        for (const ConvStage& s : conv_stages) {
            const double limit = std::sqrt(6.0 / (9.0 * s.in_c));
            for (T& value : params[p]) value = static_cast<T>((rng.next_unit() * 2.0 - 1.0) * limit);
            ++p;
            std::fill(params[p].begin(), params[p].end(), T{});
            ++p;
        }
        for (const DenseStage& s : dense_stages) {
            const double limit = std::sqrt(6.0 / s.in_n);
            for (T& value : params[p]) value = static_cast<T>((rng.next_unit() * 2.0 - 1.0) * limit);
            ++p;
            std::fill(params[p].begin(), params[p].end(), T{});
            ++p;
        }
    }

    std::size_t input_pixels() const {
        return static_cast<std::size_t>(config.input_dim) * config.input_dim;
    }

    /// Per-thread scratch: activations for each layer boundary.
    struct Workspace {
        std::vector<std::vector<T>> conv_out;   // post-conv (pre-relu storage reused)
        std::vector<std::vector<T>> pool_out;   // post-pool
        std::vector<std::vector<std::uint8_t>> argmax;
        std::vector<std::vector<T>> dense_out;  // post-dense (post-relu for hidden)
        std::vector<T> probs;
        std::vector<double> acc;                // conv accumulator scratch
        // backward scratch
        std::vector<std::vector<T>> dconv;
        std::vector<std::vector<T>> dpool;
        std::vector<std::vector<T>> ddense;
        std::vector<T> dinput;

        explicit Workspace(const CnnModel& model) {
            int max_cout = 1;
            for (const ConvStage& s : model.conv_stages) {
                conv_out.emplace_back(static_cast<std::size_t>(s.conv_h) * s.conv_w * s.out_c);
                pool_out.emplace_back(static_cast<std::size_t>(s.pool_h) * s.pool_w * s.out_c);
                argmax.emplace_back(static_cast<std::size_t>(s.pool_h) * s.pool_w * s.out_c);
                dconv.emplace_back(static_cast<std::size_t>(s.conv_h) * s.conv_w * s.out_c);
                dpool.emplace_back(static_cast<std::size_t>(s.pool_h) * s.pool_w * s.out_c);
                max_cout = std::max(max_cout, s.out_c);
            }
            for (const DenseStage& s : model.dense_stages) {
                dense_out.emplace_back(static_cast<std::size_t>(s.out_n));
                ddense.emplace_back(static_cast<std::size_t>(s.out_n));
            }
            probs.resize(static_cast<std::size_t>(model.config.n_classes));
            acc.resize(static_cast<std::size_t>(max_cout));
            dinput.resize(model.input_pixels());
        }
    };

    /// Forward pass; returns logits pointer (inside workspace).
    const T* forward(const T* image, Workspace& ws) const {
        const T* activation = image;
        for (std::size_t s = 0; s < conv_stages.size(); ++s) {
            const ConvStage& st = conv_stages[s];
            conv2d_forward(activation, st.in_h, st.in_w, st.in_c, params[2 * s].data(),
                           params[2 * s + 1].data(), st.out_c, ws.conv_out[s].data(),
                           ws.acc.data());
            relu_forward(ws.conv_out[s].data(), ws.conv_out[s].size(), ws.conv_out[s].data());
            maxpool2_forward(ws.conv_out[s].data(), st.conv_h, st.conv_w, st.out_c,
                             ws.pool_out[s].data(), ws.argmax[s].data());
            activation = ws.pool_out[s].data();
        }
        const std::size_t dense_base = 2 * conv_stages.size();
        for (std::size_t s = 0; s < dense_stages.size(); ++s) {
            const DenseStage& st = dense_stages[s];
            dense_forward(activation, st.in_n, params[dense_base + 2 * s].data(),
                          params[dense_base + 2 * s + 1].data(), st.out_n,
                          ws.dense_out[s].data());
            if (st.relu)
                relu_forward(ws.dense_out[s].data(), ws.dense_out[s].size(),
                             ws.dense_out[s].data());
            activation = ws.dense_out[s].data();
        }
        return activation;
    }

    /// Forward + backward for one sample; accumulates parameter gradients
    /// into grads (double buffers matching params shapes). Returns the loss.
    double backward(const T* image, int label, Workspace& ws,
                    std::vector<std::vector<double>>& grads) const {
        const T* logits = forward(image, ws);
        const int k = config.n_classes;
        std::vector<T>& dlast = ws.ddense.back();
        const double loss = softmax_cross_entropy(logits, k, label, ws.probs.data(), dlast.data());

        const std::size_t dense_base = 2 * conv_stages.size();
        const T* grad_above = dlast.data();
        for (std::size_t s = dense_stages.size(); s-- > 0;) {
            const DenseStage& st = dense_stages[s];
            // d(post-relu) -> d(pre-relu) for hidden layers
            if (st.relu) {
                relu_backward(ws.dense_out[s].data(), grad_above, ws.dense_out[s].size(),
                              ws.ddense[s].data());
                grad_above = ws.ddense[s].data();
            }
            const T* input = s == 0 ? (conv_stages.empty() ? image : ws.pool_out.back().data())
                                    : ws.dense_out[s - 1].data();
            T* dinput = s == 0 ? (conv_stages.empty() ? ws.dinput.data() : ws.dpool.back().data())
                               : ws.ddense[s - 1].data();
            dense_backward(input, st.in_n, params[dense_base + 2 * s].data(), st.out_n, grad_above,
                           dinput, grads[dense_base + 2 * s].data(),
                           grads[dense_base + 2 * s + 1].data());
            grad_above = dinput;
        }

        for (std::size_t s = conv_stages.size(); s-- > 0;) {
            const ConvStage& st = conv_stages[s];
            maxpool2_backward(grad_above, ws.argmax[s].data(), st.conv_h, st.conv_w, st.out_c,
                              ws.dconv[s].data());
            relu_backward(ws.conv_out[s].data(), ws.dconv[s].data(), ws.dconv[s].size(),
                          ws.dconv[s].data());
            const T* input = s == 0 ? image : ws.pool_out[s - 1].data();
            T* dinput = s == 0 ? ws.dinput.data() : ws.dpool[s - 1].data();
            conv2d_backward(input, st.in_h, st.in_w, st.in_c, params[2 * s].data(), st.out_c,
                            ws.dconv[s].data(), dinput, grads[2 * s].data(),
                            grads[2 * s + 1].data());
            grad_above = dinput;
        }
        return loss;
    }

    std::vector<std::vector<double>> make_grad_buffers() const {
        std::vector<std::vector<double>> grads;
        grads.reserve(params.size());
        for (const std::vector<T>& p : params) grads.emplace_back(p.size(), 0.0);
        return grads;
    }
};

/// Paper architectures: stage channels 32..512 with the dense head derived
/// from the input size. Throws ShapeError naming the first collapsing stage.
CnnModel<float> build_cnn(const CnnConfig& config);

/// Image batch: N square single-channel images in [0,1].
struct ImageBatch {
    int dim = 0;
    Tensor<float> images;  // [N, dim, dim, 1]
    std::vector<int> labels;
    std::vector<std::string> class_names;

    std::size_t count() const { return labels.size(); }
    const float* image(std::size_t i) const {
        return images.data.data() + i * static_cast<std::size_t>(dim) * dim;
    }
};

/// Mini-batch training with per-epoch shuffling and early stopping on the
/// validation loss (training loss when the validation split is empty).
/// Restores best-epoch weights. Deterministic for a fixed seed and thread
/// count.
TrainHistory train_cnn(CnnModel<float>& model, const ImageBatch& batch, const SplitIndices& split,
                       const TrainConfig& cfg);

/// Forward pass over the given rows (all rows when empty). Returns [N, k]
/// probabilities and argmax labels (ties toward the lower class index).
std::pair<Tensor<float>, std::vector<int>> predict(const CnnModel<float>& model,
                                                   const ImageBatch& batch,
                                                   const std::vector<std::size_t>& rows = {},
                                                   int threads = 0);

/// Central finite differences over every parameter of a (tiny) double
/// model; returns the maximum relative error against backprop.
double grad_check(CnnModel<double>& model, const std::vector<double>& image, int label,
                  double eps = 1e-3);

/// Model archive: JSON manifest + little-endian float32 weight sidecar +
/// history CSV.
void save_model(const CnnModel<float>& model, const TrainHistory& history, const TrainConfig& cfg,
                const std::string& stem);
CnnModel<float> load_model(const std::string& stem);

}  // namespace featcode
