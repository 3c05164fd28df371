#include "featcode/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "featcode/errors.hpp"
#include "featcode/rng.hpp"

namespace featcode {

namespace {

std::string hash_hex(const std::string& text) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(text)));
    return std::string(buf);
}

}  // namespace

std::string emit_report(const ExperimentReport& report, const std::string& out_dir,
                        const std::string& run_name) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::path(out_dir) / run_name;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create report directory '" + dir.string() + "'");

    const std::int64_t total = report.confusion.total();
    const double trace_ratio =
        total > 0 ? static_cast<double>(report.confusion.trace()) / static_cast<double>(total) : 0.0;
    if (std::abs(trace_ratio - report.accuracy) > 1e-12)
        throw ValueError("report accuracy disagrees with its confusion matrix");

    nlohmann::json doc;
    doc["dataset"] = report.dataset_id;
    doc["model"] = report.model_id;
    doc["encoding"] = report.encoding;
    doc["features"] = report.n_features;
    doc["config"] = nlohmann::json::parse(report.config_json);
    doc["accuracy"] = report.accuracy;
    doc["macro_f1"] = report.macro_f1;
    doc["seed"] = report.seed;
    doc["wall_clock_seconds"] = report.wall_clock_seconds;
    doc["selection_on_test"] = report.selection_on_test;
    if (!report.notes.empty()) doc["notes"] = report.notes;
    doc["class_names"] = report.confusion.class_names;
    nlohmann::json confusion = nlohmann::json::array();
    for (std::size_t t = 0; t < report.confusion.k(); ++t) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t p = 0; p < report.confusion.k(); ++p) row.push_back(report.confusion.at(t, p));
        confusion.push_back(row);
    }
    doc["confusion"] = confusion;

    {
        std::ofstream out(dir / "report.json");
        if (!out) throw IoError("cannot write '" + (dir / "report.json").string() + "'");
        out << doc.dump(2) << '\n';
    }
    {
        std::ofstream out(dir / "confusion.csv");
        if (!out) throw IoError("cannot write '" + (dir / "confusion.csv").string() + "'");
        for (std::size_t c = 0; c < report.confusion.k(); ++c) {
            out << (c ? "," : "") << report.confusion.class_names[c];
        }
        out << '\n';
        for (std::size_t t = 0; t < report.confusion.k(); ++t) {
            for (std::size_t p = 0; p < report.confusion.k(); ++p) {
                out << (p ? "," : "") << report.confusion.at(t, p);
            }
            out << '\n';
        }
    }
    if (report.history) {
        std::ofstream out(dir / "history.csv");
        if (!out) throw IoError("cannot write '" + (dir / "history.csv").string() + "'");
        out << "epoch,train_loss,train_acc,val_loss,val_acc\n";
        for (std::size_t e = 0; e < report.history->epochs.size(); ++e) {
            const EpochStats& s = report.history->epochs[e];
            out << e << ',' << s.train_loss << ',' << s.train_acc << ',';
            if (std::isnan(s.val_loss))
                out << ',';
            else
                out << s.val_loss << ',' << s.val_acc;
            out << '\n';
        }
    }

    // runs.csv: one summary row per run; re-running a run name replaces its
    // row in place so identical reruns leave identical files
    const fs::path runs_path = fs::path(out_dir) / "runs.csv";
    const std::string report_path = (fs::path(run_name) / "report.json").string();
    char acc_buf[32], f1_buf[32];
    std::snprintf(acc_buf, sizeof(acc_buf), "%.6f", report.accuracy);
    std::snprintf(f1_buf, sizeof(f1_buf), "%.6f", report.macro_f1);
    std::string row = report.dataset_id + ',' + report.model_id + ',' + report.encoding + ',' +
                      std::to_string(report.n_features) + ',' + acc_buf + ',' + f1_buf + ',' +
                      std::to_string(report.seed) + ',' + hash_hex(report.config_json) + ',' +
                      report_path;

    std::vector<std::string> lines;
    if (fs::exists(runs_path)) {
        std::ifstream in(runs_path);
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty()) lines.push_back(line);
        }
    } else {
        lines.push_back("dataset,model,encoding,features,accuracy,macro_f1,seed,config_hash,report_path");
    }
    bool replaced = false;
    for (std::string& line : lines) {
        if (line.size() >= report_path.size() &&
            line.compare(line.size() - report_path.size(), report_path.size(), report_path) == 0) {
            line = row;
            replaced = true;
        }
    }
    if (!replaced) lines.push_back(row);
    std::ofstream runs(runs_path, std::ios::trunc);
    if (!runs) throw IoError("cannot write '" + runs_path.string() + "'");
    for (const std::string& line : lines) runs << line << '\n';
    return dir.string();
}

std::vector<RunsRow> load_runs(const std::string& runs_csv_path,
                               std::vector<std::string>* warnings) {
    std::ifstream in(runs_csv_path);
    if (!in) throw IoError("cannot open '" + runs_csv_path + "' for reading");
    std::vector<RunsRow> rows;
    std::string line;
    std::getline(in, line);  // header
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        RunsRow row;
        bool ok = fields.size() == 9;
        if (ok) {
            row.dataset = fields[0];
            row.model = fields[1];
            row.encoding = fields[2];
            auto parse_u = [&](const std::string& s, auto& out) {
                const auto [p, e] = std::from_chars(s.data(), s.data() + s.size(), out);
                return e == std::errc() && p == s.data() + s.size();
            };
            auto parse_d = [&](const std::string& s, double& out) {
                const auto [p, e] = std::from_chars(s.data(), s.data() + s.size(), out);
                return e == std::errc() && p == s.data() + s.size();
            };
            ok = parse_u(fields[3], row.features) && parse_d(fields[4], row.accuracy) &&
                 parse_d(fields[5], row.macro_f1) && parse_u(fields[6], row.seed);
            row.config_hash = fields[7];
            row.report_path = fields[8];
        }
        if (!ok) {
            if (warnings)
                warnings->push_back("skipping corrupted runs.csv row " + std::to_string(line_no));
            continue;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_comparison(const std::vector<RunsRow>& rows, const std::string& out_path) {
    std::map<std::string, std::vector<RunsRow>> by_dataset;
    for (const RunsRow& row : rows) by_dataset[row.dataset].push_back(row);

    std::ofstream out(out_path);
    if (!out) throw IoError("cannot write '" + out_path + "'");
    out << "dataset,model,encoding,features,accuracy,macro_f1\n";
    for (auto& [dataset, group] : by_dataset) {
        std::stable_sort(group.begin(), group.end(),
                         [](const RunsRow& a, const RunsRow& b) { return a.accuracy > b.accuracy; });
        for (const RunsRow& row : group) {
            char acc_buf[32], f1_buf[32];
            std::snprintf(acc_buf, sizeof(acc_buf), "%.6f", row.accuracy);
            std::snprintf(f1_buf, sizeof(f1_buf), "%.6f", row.macro_f1);
            out << dataset << ',' << row.model << ',' << row.encoding << ',' << row.features << ','
                << acc_buf << ',' << f1_buf << '\n';
        }
    }
}

}  // namespace featcode
