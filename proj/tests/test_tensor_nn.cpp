#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <vector>

#include "featcode/nn.hpp"

using namespace featcode;

namespace {

// Brute-force cross-correlation, indexed the slow way on purpose.
std::vector<double> conv_oracle(const std::vector<double>& in, int h, int w, int cin,
                                const std::vector<double>& weight, const std::vector<double>& bias,
                                int cout) {
    const int oh = h - 2;
    const int ow = w - 2;
    std::vector<double> out(static_cast<std::size_t>(oh) * ow * cout, 0.0);
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x)
            for (int co = 0; co < cout; ++co) {
                double acc = bias[static_cast<std::size_t>(co)];
                for (int ky = 0; ky < 3; ++ky)
                    for (int kx = 0; kx < 3; ++kx)
                        for (int ci = 0; ci < cin; ++ci)
                            acc += in[(static_cast<std::size_t>(y + ky) * w + (x + kx)) * cin + ci] *
                                   weight[((static_cast<std::size_t>(ky) * 3 + kx) * cin + ci) * cout + co];
                out[(static_cast<std::size_t>(y) * ow + x) * cout + co] = acc;
            }
    return out;
}

std::vector<double> random_vector(Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.next_unit() * 2.0 - 1.0;
    return v;
}

}  // namespace

TEST_CASE("conv2d matches the quadruple-loop oracle") {
    Rng rng(11);
    const int h = 6, w = 6, cin = 2, cout = 3;
    const std::vector<double> in = random_vector(rng, static_cast<std::size_t>(h) * w * cin);
    const std::vector<double> weight = random_vector(rng, 9u * cin * cout);
    const std::vector<double> bias = random_vector(rng, cout);
    std::vector<double> out(static_cast<std::size_t>(h - 2) * (w - 2) * cout);
    std::vector<double> scratch(cout);
    conv2d_forward(in.data(), h, w, cin, weight.data(), bias.data(), cout, out.data(),
                   scratch.data());
    const std::vector<double> expected = conv_oracle(in, h, w, cin, weight, bias, cout);
    for (std::size_t i = 0; i < out.size(); ++i) {
        CHECK(std::abs(out[i] - expected[i]) <=
              1e-6 * std::max({std::abs(expected[i]), std::abs(out[i]), 1.0}));
    }
}

TEST_CASE("delta kernel reproduces the input cropped by one ring") {
    const int h = 5, w = 5;
    Rng rng(3);
    const std::vector<double> in = random_vector(rng, static_cast<std::size_t>(h) * w);
    std::vector<double> weight(9, 0.0);
    weight[4] = 1.0;  // center tap of the single 3x3x1x1 kernel
    std::vector<double> bias(1, 0.0);
    std::vector<double> out(9);
    std::vector<double> scratch(1);
    conv2d_forward(in.data(), h, w, 1, weight.data(), bias.data(), 1, out.data(), scratch.data());
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 3; ++x)
            CHECK(out[static_cast<std::size_t>(y) * 3 + x] ==
                  doctest::Approx(in[static_cast<std::size_t>(y + 1) * w + (x + 1)]));
}

TEST_CASE("maxpool direct cases and tie routing") {
    const std::vector<float> in = {1, 2, 3, 4};
    std::vector<float> out(1);
    std::vector<std::uint8_t> argmax(1);
    maxpool2_forward(in.data(), 2, 2, 1, out.data(), argmax.data());
    CHECK(out[0] == 4.0f);
    CHECK(argmax[0] == 3);

    // constant window: gradient goes to the first element in scan order
    const std::vector<float> flat = {5, 5, 5, 5};
    maxpool2_forward(flat.data(), 2, 2, 1, out.data(), argmax.data());
    CHECK(argmax[0] == 0);
    std::vector<float> din(4);
    const std::vector<float> dout = {2.5f};
    maxpool2_backward(dout.data(), argmax.data(), 2, 2, 1, din.data());
    CHECK(din[0] == 2.5f);
    CHECK(din[1] == 0.0f);
    CHECK(din[2] == 0.0f);
    CHECK(din[3] == 0.0f);
}

TEST_CASE("floor pooling drops the odd trailing row and column") {
    std::vector<float> in(61u * 61u * 2u, 1.0f);
    std::vector<float> out(30u * 30u * 2u);
    std::vector<std::uint8_t> argmax(out.size());
    maxpool2_forward(in.data(), 61, 61, 2, out.data(), argmax.data());
    CHECK(out.size() == 30u * 30u * 2u);
}

TEST_CASE("dense identity, constant bias, and dot-product oracle") {
    // identity weights pass the input through
    const int n = 4;
    std::vector<double> ident(16, 0.0);
    for (int i = 0; i < n; ++i) ident[static_cast<std::size_t>(i) * n + i] = 1.0;
    std::vector<double> bias(n, 0.0);
    const std::vector<double> in = {0.5, -1.0, 2.0, 0.0};
    std::vector<double> out(n);
    dense_forward(in.data(), n, ident.data(), bias.data(), n, out.data());
    for (int i = 0; i < n; ++i) CHECK(out[i] == doctest::Approx(in[static_cast<std::size_t>(i)]));

    // zero weights return the bias
    std::vector<double> zeros(12, 0.0);
    const std::vector<double> b3 = {1.0, 2.0, 3.0};
    std::vector<double> out3(3);
    dense_forward(in.data(), 4, zeros.data(), b3.data(), 3, out3.data());
    CHECK(out3 == b3);

    // random layer vs direct oracle
    Rng rng(21);
    const std::vector<double> w = random_vector(rng, 12);
    const std::vector<double> x = random_vector(rng, 4);
    dense_forward(x.data(), 4, w.data(), b3.data(), 3, out3.data());
    for (int j = 0; j < 3; ++j) {
        double acc = b3[static_cast<std::size_t>(j)];
        for (int i = 0; i < 4; ++i) acc += x[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(i) * 3 + j];
        CHECK(std::abs(out3[static_cast<std::size_t>(j)] - acc) <= 1e-7 * std::max(1.0, std::abs(acc)));
    }
}

TEST_CASE("softmax cross entropy: symmetry, stability, gradient") {
    // zero logits -> uniform probabilities, loss ln 4
    std::vector<double> probs(4);
    const std::vector<double> zero = {0, 0, 0, 0};
    const double loss = softmax_cross_entropy(zero.data(), 4, 2, probs.data());
    CHECK(loss == doctest::Approx(std::log(4.0)).epsilon(1e-9));
    for (const double p : probs) CHECK(p == doctest::Approx(0.25));

    // extreme logits do not overflow
    const std::vector<double> extreme = {1000.0, 0.0};
    std::vector<double> p2(2);
    softmax_cross_entropy(extreme.data(), 2, 0, p2.data());
    CHECK(p2[0] == doctest::Approx(1.0));
    CHECK(p2[1] == doctest::Approx(0.0));

    // random logits: probabilities sum to one, gradient matches finite differences
    Rng rng(17);
    std::vector<double> logits = random_vector(rng, 5);
    std::vector<double> p5(5), g5(5);
    softmax_cross_entropy(logits.data(), 5, 3, p5.data(), g5.data());
    double sum = 0.0;
    for (const double p : p5) {
        CHECK(p > 0.0);
        sum += p;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-6);
    const double eps = 1e-5;
    for (int i = 0; i < 5; ++i) {
        std::vector<double> bumped = logits;
        bumped[static_cast<std::size_t>(i)] += eps;
        const double up = softmax_cross_entropy(bumped.data(), 5, 3, p5.data());
        bumped[static_cast<std::size_t>(i)] -= 2 * eps;
        const double down = softmax_cross_entropy(bumped.data(), 5, 3, p5.data());
        CHECK(std::abs((up - down) / (2 * eps) - g5[static_cast<std::size_t>(i)]) <= 1e-4);
    }
}

TEST_CASE("adam: zero gradient leaves parameters unchanged; first step algebra") {
    OptimizerConfig cfg;
    std::vector<float> param = {0.5f};
    std::vector<double> m = {0.0}, v = {0.0};
    const std::vector<double> zero_grad = {0.0};
    optimizer_step(cfg, 1, zero_grad.data(), 1, param.data(), m.data(), v.data());
    CHECK(param[0] == 0.5f);

    // nonzero moments decay by their beta factors under a zero gradient
    std::vector<double> md = {0.1}, vd = {0.2};
    std::vector<float> p1 = {0.5f};
    optimizer_step(cfg, 1, zero_grad.data(), 1, p1.data(), md.data(), vd.data());
    CHECK(md[0] == doctest::Approx(0.09));
    CHECK(vd[0] == doctest::Approx(0.1998));

    // scalar parameter, g = 1, lr = 0.001, t = 1 -> delta ~ -0.000999999
    std::vector<double> p = {0.0};
    std::vector<double> m2 = {0.0}, v2 = {0.0};
    const std::vector<double> g = {1.0};
    optimizer_step(cfg, 1, g.data(), 1, p.data(), m2.data(), v2.data());
    CHECK(p[0] == doctest::Approx(-0.001 / (1.0 + 1e-8)).epsilon(1e-9));
}

TEST_CASE("build_cnn reproduces both published dimension chains") {
    CnnConfig cic;
    cic.input_dim = 128;
    cic.n_classes = 4;
    const CnnModel<float> model = build_cnn(cic);
    REQUIRE(model.conv_stages.size() == 5);
    const int conv_h[5] = {126, 61, 28, 12, 4};
    const int pool_h[5] = {63, 30, 14, 6, 2};
    const int channels[5] = {32, 64, 128, 256, 512};
    for (int s = 0; s < 5; ++s) {
        CHECK(model.conv_stages[static_cast<std::size_t>(s)].conv_h == conv_h[s]);
        CHECK(model.conv_stages[static_cast<std::size_t>(s)].pool_h == pool_h[s]);
        CHECK(model.conv_stages[static_cast<std::size_t>(s)].out_c == channels[s]);
    }
    CHECK(model.flatten_n == 2 * 2 * 512);

    CnnConfig bodmas;
    bodmas.input_dim = 395;
    bodmas.n_classes = 4;
    const CnnModel<float> big = build_cnn(bodmas);
    const int conv_h2[5] = {393, 194, 95, 45, 20};
    for (int s = 0; s < 5; ++s)
        CHECK(big.conv_stages[static_cast<std::size_t>(s)].conv_h == conv_h2[s]);
    CHECK(big.flatten_n == 10 * 10 * 512);
}

TEST_CASE("too-small input reports the collapsing stage") {
    CnnConfig bad;
    bad.input_dim = 8;
    bad.n_classes = 2;
    CHECK_THROWS_AS(build_cnn(bad), ShapeError);
}

namespace {

CnnConfig tiny_config() {
    CnnConfig cfg;
    cfg.input_dim = 12;
    cfg.n_classes = 3;
    cfg.conv_channels = {2};
    cfg.dense_hidden = {8};
    return cfg;
}

}  // namespace

TEST_CASE("full-model gradient check on a tiny instance") {
    CnnModel<double> model(tiny_config());
    model.init_weights(5);
    Rng rng(8);
    std::vector<double> image(model.input_pixels());
    for (double& p : image) p = rng.next_unit();

    const double err3 = grad_check(model, image, 1, 1e-3);
    CHECK(err3 <= 1e-4);

    // discretization error shrinks as eps drops from 1e-2 to 1e-3
    const double err2 = grad_check(model, image, 1, 1e-2);
    CHECK(err3 <= err2);
}

TEST_CASE("zero input zeroes first-layer kernel gradients but not biases") {
    CnnModel<double> model(tiny_config());
    model.init_weights(6);
    // positive conv biases keep the stage active so bias gradients can flow
    std::fill(model.params[1].begin(), model.params[1].end(), 0.05);
    const std::vector<double> image(model.input_pixels(), 0.0);
    CnnModel<double>::Workspace ws(model);
    auto grads = model.make_grad_buffers();
    model.backward(image.data(), 0, ws, grads);
    for (const double g : grads[0]) CHECK(g == 0.0);  // conv kernels see only zeros
    double bias_grad_mag = 0.0;
    for (const double g : grads[1]) bias_grad_mag += std::abs(g);
    CHECK(bias_grad_mag > 0.0);
}

TEST_CASE("one repeated sample is driven below 1e-3 loss within 200 steps") {
    CnnModel<float> model = build_cnn(tiny_config());
    model.init_weights(7);
    Rng rng(9);
    ImageBatch batch;
    batch.dim = 12;
    batch.images = Tensor<float>({1, 12, 12, 1});
    for (float& p : batch.images.data) p = static_cast<float>(rng.next_unit());
    batch.labels = {2};
    batch.class_names = {"a", "b", "c"};

    SplitIndices split;
    split.train = {0};
    TrainConfig cfg;
    cfg.lr = 0.01;
    cfg.batch_size = 1;
    cfg.epochs = 200;
    cfg.patience = 0;  // run all epochs
    cfg.threads = 1;

    const TrainHistory history = train_cnn(model, batch, split, cfg);
    double min_loss = history.epochs.front().train_loss;
    for (const EpochStats& e : history.epochs) min_loss = std::min(min_loss, e.train_loss);
    CHECK(min_loss < 1e-3);
}

namespace {

// Blob images: class c paints a c-dependent square bright on a dark field.
ImageBatch blob_images(int n_per_class, int n_classes, int dim, std::uint64_t seed) {
    Rng rng(seed);
    ImageBatch batch;
    batch.dim = dim;
    batch.images = Tensor<float>({static_cast<std::size_t>(n_per_class) * n_classes,
                                  static_cast<std::size_t>(dim), static_cast<std::size_t>(dim), 1});
    for (int c = 0; c < n_classes; ++c) batch.class_names.push_back("c" + std::to_string(c));
    std::size_t idx = 0;
    for (int c = 0; c < n_classes; ++c) {
        for (int i = 0; i < n_per_class; ++i) {
            float* img = batch.images.data.data() +
                         idx * static_cast<std::size_t>(dim) * dim;
            for (int p = 0; p < dim * dim; ++p)
                img[p] = static_cast<float>(rng.next_unit() * 0.1);
            const int x0 = 2 + 5 * c;
            for (int y = 2; y < 10; ++y)
                for (int x = x0; x < x0 + 4 && x < dim; ++x)
                    img[y * dim + x] = static_cast<float>(0.8 + rng.next_unit() * 0.2);
            batch.labels.push_back(c);
            ++idx;
        }
    }
    return batch;
}

}  // namespace

TEST_CASE("separable blob images reach 95 percent train accuracy within 10 epochs") {
    const ImageBatch batch = blob_images(50, 4, 28, 31);
    CnnConfig cfg;
    cfg.input_dim = 28;
    cfg.n_classes = 4;
    cfg.conv_channels = {8, 16};
    cfg.dense_hidden = {32};
    CnnModel<float> model = build_cnn(cfg);
    model.init_weights(12);

    SplitIndices split;
    for (std::size_t i = 0; i < batch.count(); ++i) split.train.push_back(i);
    TrainConfig train;
    train.batch_size = 16;
    train.epochs = 10;
    train.patience = 0;
    train.seed = 4;
    train.threads = 2;

    const TrainHistory history = train_cnn(model, batch, split, train);
    CHECK(history.epochs.back().train_acc >= 0.95);
    // loss decreases over the first epochs on separable data
    CHECK(history.epochs.back().train_loss < history.epochs.front().train_loss);
}

TEST_CASE("same seed gives bit-identical training trajectories") {
    const ImageBatch batch = blob_images(10, 3, 16, 77);
    CnnConfig cfg;
    cfg.input_dim = 16;
    cfg.n_classes = 3;
    cfg.conv_channels = {4};
    cfg.dense_hidden = {8};

    auto run = [&]() {
        CnnModel<float> model = build_cnn(cfg);
        model.init_weights(42);
        SplitIndices split;
        for (std::size_t i = 0; i < 24; ++i) split.train.push_back(i);
        for (std::size_t i = 24; i < batch.count(); ++i) split.validation.push_back(i);
        TrainConfig train;
        train.batch_size = 8;
        train.epochs = 4;
        train.seed = 1;
        train.threads = 2;
        const TrainHistory history = train_cnn(model, batch, split, train);
        return std::make_pair(model.params, history);
    };
    const auto [params_a, history_a] = run();
    const auto [params_b, history_b] = run();
    CHECK(params_a == params_b);
    REQUIRE(history_a.epochs.size() == history_b.epochs.size());
    for (std::size_t e = 0; e < history_a.epochs.size(); ++e) {
        CHECK(history_a.epochs[e].train_loss == history_b.epochs[e].train_loss);
        CHECK(history_a.epochs[e].val_loss == history_b.epochs[e].val_loss);
    }
}

TEST_CASE("predict is deterministic and uniform for a zero final layer") {
    CnnConfig cfg = tiny_config();
    CnnModel<float> model = build_cnn(cfg);
    model.init_weights(1);
    // zero the final dense layer: logits all zero -> uniform probabilities
    model.params[model.params.size() - 2].assign(model.params[model.params.size() - 2].size(), 0.0f);
    model.params[model.params.size() - 1].assign(model.params[model.params.size() - 1].size(), 0.0f);

    ImageBatch batch;
    batch.dim = 12;
    batch.images = Tensor<float>({2, 12, 12, 1});
    Rng rng(2);
    for (float& p : batch.images.data) p = static_cast<float>(rng.next_unit());
    batch.labels = {0, 1};
    batch.class_names = {"a", "b", "c"};

    const auto [probs_a, labels_a] = predict(model, batch);
    const auto [probs_b, labels_b] = predict(model, batch);
    CHECK(probs_a.data == probs_b.data);
    CHECK(labels_a == labels_b);
    for (const float p : probs_a.data) CHECK(p == doctest::Approx(1.0f / 3.0f));
    CHECK(labels_a == std::vector<int>{0, 0});  // argmax ties resolve to class 0
}

TEST_CASE("model archive round-trips weights and architecture") {
    CnnModel<float> model = build_cnn(tiny_config());
    model.init_weights(55);
    TrainHistory history;
    history.epochs.push_back({0.9, 0.5, 0.8, 0.6});
    history.best_epoch = 0;
    const TrainConfig cfg;
    save_model(model, history, cfg, "test_model_archive");
    const CnnModel<float> loaded = load_model("test_model_archive");
    CHECK(loaded.params == model.params);
    CHECK(loaded.config.input_dim == model.config.input_dim);
    for (const char* suffix : {".json", ".weights", ".history.csv"}) {
        std::remove((std::string("test_model_archive") + suffix).c_str());
    }
}
