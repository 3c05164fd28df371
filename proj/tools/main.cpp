#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"featcode: feature tables -> QR/Aztec images -> CNN and classic classifiers"};
    app.require_subcommand(1);

    featcode::cli::IngestArgs ingest;
    CLI::App* cmd_ingest = app.add_subcommand("ingest", "Load a dataset into the FTBL table format");
    cmd_ingest->add_option("--dataset", ingest.dataset, "Dataset kind: cic | bodmas | csv | synth")
        ->required();
    cmd_ingest->add_option("--input", ingest.input, "Input CSV or FTBL features file")
        ->capture_default_str();
    cmd_ingest->add_option("--meta", ingest.meta, "BODMAS metadata CSV (row_index,label)")
        ->capture_default_str();
    cmd_ingest->add_option("--expected-dim", ingest.expected_dim, "BODMAS feature dimension")
        ->capture_default_str();
    cmd_ingest->add_option("--per-class", ingest.per_class,
                           "Random per-class subsample count (-1 keeps everything)")
        ->capture_default_str();
    cmd_ingest->add_option("--classes", ingest.classes, "synth: class count")->capture_default_str();
    cmd_ingest->add_option("--features", ingest.features, "synth: feature count")
        ->capture_default_str();
    cmd_ingest->add_option("--sep", ingest.separation, "synth: class mean separation in sigma units")
        ->capture_default_str();
    cmd_ingest->add_option("--n", ingest.n_per_class, "synth: samples per class")
        ->capture_default_str();
    cmd_ingest->add_option("--seed", ingest.seed, "Run seed")->capture_default_str();
    cmd_ingest->add_option("--out", ingest.out, "Output table stem (writes stem.ftbl etc.)")
        ->required();

    featcode::cli::SelectArgs select;
    CLI::App* cmd_select =
        app.add_subcommand("select", "Score features on the training rows and keep the top K");
    cmd_select->add_option("--table", select.table, "Table stem from ingest")->required();
    cmd_select->add_option("--method", select.method, "Scoring method: chi2 | anova")
        ->capture_default_str();
    cmd_select->add_option("--k", select.k, "Number of features to keep")->capture_default_str();
    cmd_select->add_option("--split", select.split, "train,validation,test ratios")
        ->capture_default_str();
    cmd_select->add_option("--seed", select.seed, "Run seed")->capture_default_str();
    cmd_select->add_option("--out", select.out, "Selection manifest JSON path")->required();

    featcode::cli::EncodeArgs encode;
    CLI::App* cmd_encode =
        app.add_subcommand("encode", "Render each sample's selected features as a barcode image");
    cmd_encode->add_option("--table", encode.table, "Table stem from ingest")->required();
    cmd_encode->add_option("--select", encode.select, "Selection manifest from select")->required();
    cmd_encode->add_option("--code", encode.code, "Symbology: qr | aztec")->capture_default_str();
    cmd_encode->add_option("--qr-version", encode.qr_version, "Pinned QR version (0 = smallest)")
        ->capture_default_str();
    cmd_encode->add_option("--aztec-layers", encode.aztec_layers,
                           "Pinned Aztec layers, negative = compact (0 = smallest)")
        ->capture_default_str();
    cmd_encode->add_option("--box", encode.box_size, "QR pixels per module")->capture_default_str();
    cmd_encode->add_option("--border", encode.border, "QR quiet-zone width in modules")
        ->capture_default_str();
    cmd_encode->add_option("--module-size", encode.module_size, "Aztec pixels per module")
        ->capture_default_str();
    cmd_encode->add_option("--precision", encode.precision, "Fixed-point digits per feature value")
        ->capture_default_str();
    cmd_encode->add_option("--threads", encode.threads, "Worker threads (0 = all cores)")
        ->capture_default_str();
    cmd_encode->add_option("--out", encode.out, "Image output directory")->required();

    featcode::cli::TrainArgs train;
    CLI::App* cmd_train = app.add_subcommand("train", "Train a model and emit an experiment report");
    cmd_train->add_option("--model", train.model, "Model kind: cnn | rf | mlp | svc")->required();
    cmd_train->add_option("--images", train.images, "Encoded image directory (cnn)")
        ->capture_default_str();
    cmd_train->add_option("--table", train.table, "Table stem (rf, mlp, svc)")
        ->capture_default_str();
    cmd_train->add_option("--split", train.split, "train,validation,test ratios")
        ->capture_default_str();
    cmd_train->add_option("--seed", train.seed, "Run seed")->capture_default_str();
    cmd_train->add_option("--threads", train.threads, "Worker threads (0 = all cores)")
        ->capture_default_str();
    cmd_train->add_option("--out", train.out, "Report output directory")->capture_default_str();
    cmd_train->add_option("--run-name", train.run_name, "Report subdirectory name")
        ->capture_default_str();
    cmd_train->add_option("--dim", train.dim, "cnn: input image dimension")->capture_default_str();
    cmd_train->add_option("--lr", train.lr, "cnn/mlp: learning rate")->capture_default_str();
    cmd_train->add_option("--batch", train.batch, "cnn: mini-batch size")->capture_default_str();
    cmd_train->add_option("--epochs", train.epochs, "cnn: training epochs")->capture_default_str();
    cmd_train->add_option("--optimizer", train.optimizer, "cnn: adam | nadam | rmsprop")
        ->capture_default_str();
    cmd_train->add_option("--patience", train.patience, "cnn: early-stopping patience (0 = off)")
        ->capture_default_str();
    cmd_train->add_option("--grid", train.grid, "cnn: hyperparameter grid JSON file")
        ->capture_default_str();
    cmd_train->add_option("--trees", train.trees, "rf: estimator count")->capture_default_str();
    cmd_train->add_option("--criterion", train.criterion, "rf: gini | entropy")
        ->capture_default_str();
    cmd_train->add_option("--hidden", train.hidden, "mlp: hidden layer sizes")
        ->capture_default_str();
    cmd_train->add_option("--solver", train.solver, "mlp: adam | sgd")->capture_default_str();
    cmd_train->add_option("--max-iter", train.max_iter, "mlp: training epochs")
        ->capture_default_str();
    cmd_train->add_option("--kernel", train.kernel, "svc: rbf | poly")->capture_default_str();
    cmd_train->add_option("--gamma", train.gamma, "svc: scale | auto | <value>")
        ->capture_default_str();
    cmd_train->add_option("--C", train.C, "svc: regularization strength")->capture_default_str();
    cmd_train->add_option("--svc-cap", train.svc_cap, "svc: training row cap")
        ->capture_default_str();

    featcode::cli::EvaluateArgs evaluate;
    CLI::App* cmd_evaluate =
        app.add_subcommand("evaluate", "Re-evaluate a saved model on a test split");
    cmd_evaluate->add_option("--model", evaluate.model_stem, "Model archive stem or JSON path")
        ->required();
    cmd_evaluate->add_option("--kind", evaluate.kind, "Model kind: cnn | rf | mlp | svc")
        ->required();
    cmd_evaluate->add_option("--images", evaluate.images, "Encoded image directory (cnn)")
        ->capture_default_str();
    cmd_evaluate->add_option("--table", evaluate.table, "Table stem (rf, mlp, svc)")
        ->capture_default_str();
    cmd_evaluate->add_option("--split", evaluate.split, "train,validation,test ratios")
        ->capture_default_str();
    cmd_evaluate->add_option("--seed", evaluate.seed, "Run seed")->capture_default_str();
    cmd_evaluate->add_option("--out", evaluate.out, "Report output directory")
        ->capture_default_str();
    cmd_evaluate->add_option("--run-name", evaluate.run_name, "Report subdirectory name")
        ->capture_default_str();

    featcode::cli::ReportArgs report;
    CLI::App* cmd_report =
        app.add_subcommand("report", "Aggregate runs.csv into a per-dataset comparison table");
    cmd_report->add_option("--runs", report.runs, "runs.csv produced by train")
        ->capture_default_str();
    cmd_report->add_option("--out", report.out, "Comparison CSV path")->capture_default_str();

    featcode::cli::IngestArgs synth;
    synth.dataset = "synth";
    CLI::App* cmd_synth = app.add_subcommand("synth", "Generate a Gaussian-blob table");
    cmd_synth->add_option("--classes", synth.classes, "Class count")->capture_default_str();
    cmd_synth->add_option("--features", synth.features, "Feature count")->capture_default_str();
    cmd_synth->add_option("--sep", synth.separation, "Class mean separation in sigma units")
        ->capture_default_str();
    cmd_synth->add_option("--n", synth.n_per_class, "Samples per class")->capture_default_str();
    cmd_synth->add_option("--seed", synth.seed, "Run seed")->capture_default_str();
    cmd_synth->add_option("--out", synth.out, "Output table stem")->required();

    CLI11_PARSE(app, argc, argv);

    if (cmd_ingest->parsed()) return featcode::cli::cmd_ingest(ingest);
    if (cmd_select->parsed()) return featcode::cli::cmd_select(select);
    if (cmd_encode->parsed()) return featcode::cli::cmd_encode(encode);
    if (cmd_train->parsed()) return featcode::cli::cmd_train(train);
    if (cmd_evaluate->parsed()) return featcode::cli::cmd_evaluate(evaluate);
    if (cmd_report->parsed()) return featcode::cli::cmd_report(report);
    if (cmd_synth->parsed()) return featcode::cli::cmd_ingest(synth);
    return 0;
}
