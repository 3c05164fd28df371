#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace featcode::cli {

// exit codes: 0 success, 2 input error, 3 training/model error, 4 report error
constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitTrain = 3;
constexpr int kExitReport = 4;

struct IngestArgs {
    std::string dataset;  // cic | bodmas | csv | synth
    std::string input;
    std::string meta;
    std::size_t expected_dim = 2384;
    long per_class = -1;  // ingest-time subsample; -1 keeps everything
    int classes = 4;
    int features = 10;
    double separation = 3.0;
    int n_per_class = 400;
    std::uint64_t seed = 0;
    std::string out;
};

struct SelectArgs {
    std::string table;
    std::string method = "chi2";  // chi2 | anova
    std::size_t k = 10;
    std::string split = "0.70,0.15,0.15";
    std::uint64_t seed = 0;
    std::string out;
};

struct EncodeArgs {
    std::string table;
    std::string select;
    std::string code = "qr";  // qr | aztec
    int qr_version = 0;
    int aztec_layers = 0;
    int box_size = 5;
    int border = 1;
    int module_size = 5;
    int precision = 4;
    int threads = 0;
    std::string out;
};

struct TrainArgs {
    std::string model;  // cnn | rf | mlp | svc
    std::string images;
    std::string table;
    std::string select;
    std::string split = "0.70,0.15,0.15";
    std::uint64_t seed = 0;
    int threads = 0;
    std::string out = "runs";
    std::string run_name;

    // cnn
    int dim = 128;
    double lr = 0.001;
    int batch = 64;
    int epochs = 5;
    std::string optimizer = "adam";
    int patience = 2;
    std::string grid;

    // rf
    int trees = 1000;
    std::string criterion = "gini";

    // mlp
    std::string hidden = "10,10,10";
    std::string solver = "adam";
    int max_iter = 200;

    // svc
    std::string kernel = "rbf";
    std::string gamma = "scale";
    double C = 1.0;
    long svc_cap = 4000;
};

struct EvaluateArgs {
    std::string model_stem;
    std::string kind;  // cnn | rf | mlp | svc
    std::string images;
    std::string table;
    std::string select;
    std::string split = "0.70,0.15,0.15";
    std::uint64_t seed = 0;
    int dim = 128;
    std::string out = "runs";
    std::string run_name = "evaluate";
};

struct ReportArgs {
    std::string runs = "runs/runs.csv";
    std::string out = "comparison.csv";
};

int cmd_ingest(const IngestArgs& args);
int cmd_select(const SelectArgs& args);
int cmd_encode(const EncodeArgs& args);
int cmd_train(const TrainArgs& args);
int cmd_evaluate(const EvaluateArgs& args);
int cmd_report(const ReportArgs& args);

}  // namespace featcode::cli
