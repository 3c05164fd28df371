#include "commands.hpp"

#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "featcode/dataset.hpp"
#include "featcode/encode_pipeline.hpp"
#include "featcode/errors.hpp"
#include "featcode/forest.hpp"
#include "featcode/metrics.hpp"
#include "featcode/mlp.hpp"
#include "featcode/nn.hpp"
#include "featcode/preprocess.hpp"
#include "featcode/report.hpp"
#include "featcode/rng.hpp"
#include "featcode/svc.hpp"

namespace featcode::cli {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

void parse_ratios(const std::string& text, double& train, double& val, double& test) {
    std::stringstream ss(text);
    std::string field;
    std::vector<double> parts;
    while (std::getline(ss, field, ',')) parts.push_back(std::stod(field));
    if (parts.size() != 3) throw ValueError("--split expects three comma-separated ratios");
    train = parts[0];
    val = parts[1];
    test = parts[2];
}

std::vector<int> parse_int_list(const std::string& text) {
    std::stringstream ss(text);
    std::string field;
    std::vector<int> out;
    while (std::getline(ss, field, ',')) out.push_back(std::stoi(field));
    return out;
}

FeatureTable load_table(const std::string& stem) { return load_ftbl(stem); }

std::vector<int> labels_at(const FeatureTable& table, const std::vector<std::size_t>& rows) {
    std::vector<int> out;
    out.reserve(rows.size());
    for (const std::size_t r : rows) out.push_back(table.labels[r]);
    return out;
}

ExperimentReport make_report(const std::string& dataset, const std::string& model,
                             const std::string& encoding, std::size_t features,
                             const Evaluation& eval, std::uint64_t seed,
                             const nlohmann::json& config) {
    ExperimentReport report;
    report.dataset_id = dataset;
    report.model_id = model;
    report.encoding = encoding;
    report.n_features = features;
    report.accuracy = eval.accuracy;
    report.macro_f1 = eval.macro_f1;
    report.confusion = eval.confusion;
    report.seed = seed;
    report.config_json = config.dump();
    return report;
}

std::string dataset_id_of(const std::string& table_stem) {
    return fs::path(table_stem).filename().string();
}

OptimizerKind optimizer_from(const std::string& name) {
    if (name == "adam") return OptimizerKind::adam;
    if (name == "nadam") return OptimizerKind::nadam;
    if (name == "rmsprop") return OptimizerKind::rmsprop;
    throw ValueError("unknown optimizer '" + name + "'");
}

int run_guarded(int failure_code, const std::function<int()>& body) {
    try {
        return body();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return failure_code;
    }
}

}  // namespace

int cmd_ingest(const IngestArgs& args) {
    return run_guarded(kExitInput, [&] {
        FeatureTable table;
        if (args.dataset == "cic") {
            table = load_cic_csv(args.input);
        } else if (args.dataset == "bodmas") {
            table = load_bodmas(args.input, args.meta, args.expected_dim);
        } else if (args.dataset == "csv") {
            table = load_csv(args.input);
        } else if (args.dataset == "synth") {
            SynthProfile profile;
            profile.n_classes = args.classes;
            profile.n_features = args.features;
            profile.class_separation = args.separation;
            profile.n_per_class = args.n_per_class;
            profile.seed = derive_seed(args.seed, "synth");
            table = synth_generate(profile);
        } else {
            throw ValueError("unknown dataset kind '" + args.dataset + "'");
        }

        if (args.per_class >= 0) {
            std::map<int, std::size_t> want;
            for (std::size_t c = 0; c < table.class_names.size(); ++c)
                want[static_cast<int>(c)] = static_cast<std::size_t>(args.per_class);
            table = subsample_per_class(table, want, derive_seed(args.seed, "subsample"));
        }

        const fs::path out(args.out);
        if (out.has_parent_path()) fs::create_directories(out.parent_path());
        save_ftbl(table, args.out);
        std::cout << "wrote " << table.rows() << " rows x " << table.cols() << " features to "
                  << args.out << ".ftbl\n";
        return kExitOk;
    });
}

int cmd_select(const SelectArgs& args) {
    return run_guarded(kExitInput, [&] {
        const FeatureTable table = load_table(args.table);
        double train_ratio, val_ratio, test_ratio;
        parse_ratios(args.split, train_ratio, val_ratio, test_ratio);
        const SplitIndices split = stratified_split(table, train_ratio, val_ratio, test_ratio,
                                                    derive_seed(args.seed, "split"));

        // the minmax scaler keeps chi2 inputs non-negative and payload
        // values inside [0,1]; fitted on training rows only
        const ScalerParams scaler = fit_scaler(table, split.train, ScalerKind::minmax);
        const FeatureTable scaled = apply_scaler(table, scaler);

        FeatureScores scores;
        if (args.method == "chi2") {
            scores = chi2_scores(scaled, split.train);
        } else if (args.method == "anova") {
            scores = anova_f_scores(scaled, split.train);
        } else {
            throw ValueError("unknown selection method '" + args.method + "'");
        }
        const std::vector<std::size_t> indices = select_k_best(scores, args.k);

        const fs::path out(args.out);
        if (out.has_parent_path()) fs::create_directories(out.parent_path());
        save_selection_manifest(args.out, scores, indices, scaler);
        std::cout << "selected " << indices.size() << " features by " << args.method << " into "
                  << args.out << '\n';
        return kExitOk;
    });
}

int cmd_encode(const EncodeArgs& args) {
    return run_guarded(kExitInput, [&] {
        const FeatureTable table = load_table(args.table);
        const SelectionManifest selection = load_selection_manifest(args.select);
        const FeatureTable scaled = apply_scaler(table, selection.scaler);

        EncodeOptions options;
        options.symbology = args.code == "aztec" ? Symbology::aztec : Symbology::qr;
        if (args.code != "qr" && args.code != "aztec")
            throw ValueError("unknown symbology '" + args.code + "'");
        options.qr_version = args.qr_version;
        options.aztec_layers = args.aztec_layers;
        options.box_size = args.box_size;
        options.border = args.border;
        options.module_size = args.module_size;
        options.precision = args.precision;
        options.threads = args.threads;

        const std::string manifest = encode_table_to_dir(scaled, selection.indices, options, args.out);

        nlohmann::json classes;
        classes["class_names"] = table.class_names;
        std::ofstream out(fs::path(args.out) / "classes.json");
        out << classes.dump(2) << '\n';

        std::cout << "encoded " << table.rows() << " samples into " << args.out
                  << " (manifest " << manifest << ")\n";
        return kExitOk;
    });
}

namespace {

std::vector<int> labels_at_batch(const ImageBatch& batch, const std::vector<std::size_t>& rows) {
    std::vector<int> out;
    out.reserve(rows.size());
    for (const std::size_t r : rows) out.push_back(batch.labels[r]);
    return out;
}

std::string manifest_symbology(const std::string& images_dir) {
    std::ifstream in(fs::path(images_dir) / "manifest.jsonl");
    std::string line;
    if (in && std::getline(in, line) && !line.empty()) {
        return nlohmann::json::parse(line).value("symbology", "none");
    }
    return "none";
}

struct CnnRun {
    TrainHistory history;
    Evaluation test_eval;
    double selection_metric = 0.0;
    bool selection_on_test = false;
};

CnnRun run_cnn_once(CnnModel<float>& model, const ImageBatch& batch, const SplitIndices& split,
                    const TrainConfig& cfg) {
    CnnRun run;
    run.history = train_cnn(model, batch, split, cfg);
    const auto [probs, predicted] = predict(model, batch, split.test, cfg.threads);
    (void)probs;
    run.test_eval = evaluate(labels_at_batch(batch, split.test), predicted, batch.class_names);
    if (!split.validation.empty()) {
        const auto [vp, vpred] = predict(model, batch, split.validation, cfg.threads);
        (void)vp;
        const Evaluation val_eval =
            evaluate(labels_at_batch(batch, split.validation), vpred, batch.class_names);
        run.selection_metric = val_eval.accuracy;
    } else {
        run.selection_metric = run.test_eval.accuracy;
        run.selection_on_test = true;
    }
    return run;
}

}  // namespace

int cmd_train(const TrainArgs& args) {
    return run_guarded(kExitTrain, [&] {
        const auto started = Clock::now();
        double train_ratio, val_ratio, test_ratio;
        parse_ratios(args.split, train_ratio, val_ratio, test_ratio);

        const std::string run_name =
            args.run_name.empty() ? args.model + "_" + std::to_string(args.seed) : args.run_name;

        if (args.model == "cnn") {
            if (args.images.empty()) throw ValueError("--images is required for --model cnn");
            std::vector<std::string> class_names;
            {
                std::ifstream in(fs::path(args.images) / "classes.json");
                if (!in) throw IoError("missing classes.json under '" + args.images + "'");
                nlohmann::json doc;
                in >> doc;
                class_names = doc.at("class_names").get<std::vector<std::string>>();
            }

            TrainConfig cfg;
            cfg.lr = args.lr;
            cfg.batch_size = args.batch;
            cfg.epochs = args.epochs;
            cfg.optimizer = optimizer_from(args.optimizer);
            cfg.patience = args.patience;
            cfg.seed = args.seed;
            cfg.threads = args.threads;

            const std::string manifest = (fs::path(args.images) / "manifest.jsonl").string();

            auto run_for = [&](int dim, const TrainConfig& train_cfg, CnnModel<float>& model,
                               CnnRun& out_run) {
                const ImageBatch batch = load_image_dir(manifest, class_names, dim);
                const SplitIndices split =
                    stratified_split_labels(batch.labels, batch.class_names.size(), train_ratio,
                                            val_ratio, test_ratio,
                                            derive_seed(args.seed, "split"));
                out_run = run_cnn_once(model, batch, split, train_cfg);
            };

            CnnConfig arch;
            arch.n_classes = static_cast<int>(class_names.size());

            nlohmann::json config_json;
            CnnRun run;
            CnnModel<float> final_model(arch);  // placeholder, rebuilt below

            if (!args.grid.empty()) {
                std::ifstream in(args.grid);
                if (!in) throw IoError("cannot open grid file '" + args.grid + "'");
                nlohmann::json grid_json;
                in >> grid_json;
                GridSpec spec;
                for (const auto& [axis, values] : grid_json.items()) {
                    GridAxis ga;
                    ga.name = axis;
                    for (const auto& v : values)
                        ga.values.push_back(v.is_string() ? v.get<std::string>() : v.dump());
                    spec.axes.push_back(std::move(ga));
                }
                const GridResult grid = grid_search(spec, [&](const GridConfig& cell) {
                    TrainConfig cell_cfg = cfg;
                    int cell_dim = args.dim;
                    if (cell.count("lr")) cell_cfg.lr = std::stod(cell.at("lr"));
                    if (cell.count("batch_size")) cell_cfg.batch_size = std::stoi(cell.at("batch_size"));
                    if (cell.count("epochs")) cell_cfg.epochs = std::stoi(cell.at("epochs"));
                    if (cell.count("optimizer")) cell_cfg.optimizer = optimizer_from(cell.at("optimizer"));
                    if (cell.count("image_dim")) cell_dim = std::stoi(cell.at("image_dim"));
                    CnnConfig cell_arch = arch;
                    cell_arch.input_dim = cell_dim;
                    CnnModel<float> model = build_cnn(cell_arch);
                    model.init_weights(derive_seed(args.seed, "cnn-init"));
                    CnnRun cell_run;
                    run_for(cell_dim, cell_cfg, model, cell_run);
                    return cell_run.selection_metric;
                });
                // retrain the winning cell to produce the final model
                if (grid.best.count("lr")) cfg.lr = std::stod(grid.best.at("lr"));
                if (grid.best.count("batch_size")) cfg.batch_size = std::stoi(grid.best.at("batch_size"));
                if (grid.best.count("epochs")) cfg.epochs = std::stoi(grid.best.at("epochs"));
                if (grid.best.count("optimizer")) cfg.optimizer = optimizer_from(grid.best.at("optimizer"));
                int dim = args.dim;
                if (grid.best.count("image_dim")) dim = std::stoi(grid.best.at("image_dim"));
                arch.input_dim = dim;
                final_model = build_cnn(arch);
                final_model.init_weights(derive_seed(args.seed, "cnn-init"));
                run_for(dim, cfg, final_model, run);
                config_json["grid_best"] = grid.best;
                config_json["grid_cells"] = grid.cells.size();
            } else {
                arch.input_dim = args.dim;
                final_model = build_cnn(arch);
                final_model.init_weights(derive_seed(args.seed, "cnn-init"));
                run_for(args.dim, cfg, final_model, run);
            }

            config_json["lr"] = cfg.lr;
            config_json["batch_size"] = cfg.batch_size;
            config_json["epochs"] = cfg.epochs;
            config_json["optimizer"] = args.optimizer;
            config_json["patience"] = cfg.patience;
            config_json["input_dim"] = final_model.config.input_dim;

            ExperimentReport report =
                make_report(fs::path(args.images).filename().string(), "cnn",
                            manifest_symbology(args.images), 0, run.test_eval, args.seed,
                            config_json);
            report.history = run.history;
            report.selection_on_test = run.selection_on_test;
            report.wall_clock_seconds =
                std::chrono::duration<double>(Clock::now() - started).count();
            const std::string dir = emit_report(report, args.out, run_name);
            save_model(final_model, run.history, cfg, (fs::path(dir) / "model").string());
            std::cout << "cnn test accuracy " << run.test_eval.accuracy << ", report in " << dir
                      << '\n';
            return kExitOk;
        }

        // feature-space baselines
        if (args.table.empty()) throw ValueError("--table is required for baseline models");
        const FeatureTable table = load_table(args.table);
        SplitIndices split = stratified_split(table, train_ratio, val_ratio, test_ratio,
                                              derive_seed(args.seed, "split"));
        // baselines train on train+validation (no early stopping to feed)
        std::vector<std::size_t> fit_rows = split.train;
        fit_rows.insert(fit_rows.end(), split.validation.begin(), split.validation.end());
        const std::vector<int> truth = labels_at(table, split.test);

        nlohmann::json config_json;
        ExperimentReport report;

        if (args.model == "rf") {
            ForestConfig config;
            config.n_estimators = args.trees;
            config.criterion =
                args.criterion == "entropy" ? SplitCriterion::entropy : SplitCriterion::gini;
            config.seed = derive_seed(args.seed, "forest");
            config.threads = args.threads;
            const ForestModel model = train_random_forest(table, fit_rows, config);
            const Evaluation eval =
                evaluate(truth, model.predict_rows(table, split.test), table.class_names);
            config_json["n_estimators"] = args.trees;
            config_json["criterion"] = args.criterion;
            report = make_report(dataset_id_of(args.table), "rf", "none", table.cols(), eval,
                                 args.seed, config_json);
            report.wall_clock_seconds =
                std::chrono::duration<double>(Clock::now() - started).count();
            const std::string dir = emit_report(report, args.out, run_name);
            save_forest(model, (fs::path(dir) / "model.json").string());
            std::cout << "rf test accuracy " << eval.accuracy << ", report in " << dir << '\n';
            return kExitOk;
        }

        // mlp and svc consume standard-scaled inputs
        const FeatureTable scaled =
            apply_scaler(table, fit_scaler(table, fit_rows, ScalerKind::standard));

        if (args.model == "mlp") {
            MlpConfig config;
            config.hidden_sizes = parse_int_list(args.hidden);
            config.solver = args.solver == "sgd" ? MlpSolver::sgd : MlpSolver::adam;
            config.lr = args.lr;
            config.max_iter = args.max_iter;
            config.seed = derive_seed(args.seed, "mlp");
            const MlpModel model = train_mlp(scaled, fit_rows, config);
            const Evaluation eval =
                evaluate(truth, model.predict_rows(scaled, split.test), table.class_names);
            config_json["hidden"] = args.hidden;
            config_json["solver"] = args.solver;
            config_json["max_iter"] = args.max_iter;
            report = make_report(dataset_id_of(args.table), "mlp", "none", table.cols(), eval,
                                 args.seed, config_json);
            report.wall_clock_seconds =
                std::chrono::duration<double>(Clock::now() - started).count();
            const std::string dir = emit_report(report, args.out, run_name);
            save_mlp(model, (fs::path(dir) / "model.json").string());
            std::cout << "mlp test accuracy " << eval.accuracy << ", report in " << dir << '\n';
            return kExitOk;
        }

        if (args.model == "svc") {
            SvcConfig config;
            config.kernel = args.kernel == "poly" ? SvcKernel::poly : SvcKernel::rbf;
            if (args.gamma == "scale")
                config.gamma_mode = GammaMode::scale;
            else if (args.gamma == "auto")
                config.gamma_mode = GammaMode::auto_mode;
            else {
                config.gamma_mode = GammaMode::value;
                config.gamma_value = std::stod(args.gamma);
            }
            config.C = args.C;
            config.max_train_rows = static_cast<std::size_t>(args.svc_cap);
            config.seed = derive_seed(args.seed, "svc");
            const SvcModel model = train_svc(scaled, fit_rows, config);
            const Evaluation eval =
                evaluate(truth, model.predict_rows(scaled, split.test), table.class_names);
            config_json["kernel"] = args.kernel;
            config_json["gamma"] = args.gamma;
            config_json["C"] = args.C;
            config_json["max_train_rows"] = args.svc_cap;
            report = make_report(dataset_id_of(args.table), "svc", "none", table.cols(), eval,
                                 args.seed, config_json);
            if (model.subsampled)
                report.notes = "svc training rows capped at " + std::to_string(args.svc_cap);
            report.wall_clock_seconds =
                std::chrono::duration<double>(Clock::now() - started).count();
            const std::string dir = emit_report(report, args.out, run_name);
            save_svc(model, (fs::path(dir) / "model.json").string());
            std::cout << "svc test accuracy " << eval.accuracy << ", report in " << dir << '\n';
            return kExitOk;
        }

        throw ValueError("unknown model kind '" + args.model + "'");
    });
}

int cmd_evaluate(const EvaluateArgs& args) {
    return run_guarded(kExitTrain, [&] {
        double train_ratio, val_ratio, test_ratio;
        parse_ratios(args.split, train_ratio, val_ratio, test_ratio);
        nlohmann::json config_json;
        config_json["evaluated_model"] = args.model_stem;

        Evaluation eval;
        std::string dataset;
        std::size_t n_features = 0;
        std::string encoding = "none";

        if (args.kind == "cnn") {
            if (args.images.empty()) throw ValueError("--images is required for --kind cnn");
            std::vector<std::string> class_names;
            {
                std::ifstream in(fs::path(args.images) / "classes.json");
                if (!in) throw IoError("missing classes.json under '" + args.images + "'");
                nlohmann::json doc;
                in >> doc;
                class_names = doc.at("class_names").get<std::vector<std::string>>();
            }
            const CnnModel<float> model = load_model(args.model_stem);
            const ImageBatch batch =
                load_image_dir((fs::path(args.images) / "manifest.jsonl").string(), class_names,
                               model.config.input_dim);
            const SplitIndices split =
                stratified_split_labels(batch.labels, batch.class_names.size(), train_ratio,
                                        val_ratio, test_ratio, derive_seed(args.seed, "split"));
            const auto [probs, predicted] = predict(model, batch, split.test);
            (void)probs;
            eval = evaluate(labels_at_batch(batch, split.test), predicted, class_names);
            dataset = fs::path(args.images).filename().string();
            encoding = manifest_symbology(args.images);
        } else {
            if (args.table.empty()) throw ValueError("--table is required for feature models");
            const FeatureTable table = load_table(args.table);
            const SplitIndices split = stratified_split(table, train_ratio, val_ratio, test_ratio,
                                                        derive_seed(args.seed, "split"));
            std::vector<std::size_t> fit_rows = split.train;
            fit_rows.insert(fit_rows.end(), split.validation.begin(), split.validation.end());
            const std::vector<int> truth = labels_at(table, split.test);
            dataset = dataset_id_of(args.table);
            n_features = table.cols();

            if (args.kind == "rf") {
                const ForestModel model = load_forest(args.model_stem);
                eval = evaluate(truth, model.predict_rows(table, split.test), table.class_names);
            } else if (args.kind == "mlp") {
                const FeatureTable scaled =
                    apply_scaler(table, fit_scaler(table, fit_rows, ScalerKind::standard));
                const MlpModel model = load_mlp(args.model_stem);
                eval = evaluate(truth, model.predict_rows(scaled, split.test), table.class_names);
            } else if (args.kind == "svc") {
                const FeatureTable scaled =
                    apply_scaler(table, fit_scaler(table, fit_rows, ScalerKind::standard));
                const SvcModel model = load_svc(args.model_stem);
                eval = evaluate(truth, model.predict_rows(scaled, split.test), table.class_names);
            } else {
                throw ValueError("unknown model kind '" + args.kind + "'");
            }
        }

        ExperimentReport report = make_report(dataset, args.kind + "_eval", encoding, n_features,
                                              eval, args.seed, config_json);
        const std::string dir = emit_report(report, args.out, args.run_name);
        std::cout << "test accuracy " << eval.accuracy << ", report in " << dir << '\n';
        return kExitOk;
    });
}

int cmd_report(const ReportArgs& args) {
    return run_guarded(kExitReport, [&] {
        std::vector<std::string> warnings;
        const std::vector<RunsRow> rows = load_runs(args.runs, &warnings);
        for (const std::string& warning : warnings) std::cerr << "warning: " << warning << '\n';
        if (rows.empty()) {
            std::cerr << "error: no completed runs in '" << args.runs << "'\n";
            return kExitReport;
        }
        write_comparison(rows, args.out);
        std::cout << "wrote comparison of " << rows.size() << " runs to " << args.out << '\n';
        return kExitOk;
    });
}

}  // namespace featcode::cli
