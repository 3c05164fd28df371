#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "featcode/metrics.hpp"
#include "featcode/nn.hpp"

namespace featcode {

/// Metrics bundle for one completed run, serialized by emit_report.
struct ExperimentReport {
    std::string dataset_id;
    std::string model_id;
    std::string encoding = "none";  // qr | aztec | none (raw features)
    std::size_t n_features = 0;
    std::string config_json = "{}";
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    ConfusionMatrix confusion;
    std::optional<TrainHistory> history;
    double wall_clock_seconds = 0.0;
    std::uint64_t seed = 0;
    // test accuracy used for model selection (no validation split); the
    // estimate is optimistically biased and flagged as such
    bool selection_on_test = false;
    std::string notes;
};

/// Writes report.json, confusion.csv, history.csv (when present) under
/// out_dir/<run_name>/ and appends one line to out_dir/runs.csv. Returns
/// the report directory.
std::string emit_report(const ExperimentReport& report, const std::string& out_dir,
                        const std::string& run_name);

struct RunsRow {
    std::string dataset;
    std::string model;
    std::string encoding;
    std::size_t features = 0;
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::string report_path;
};

/// Parses runs.csv, skipping corrupted rows (reported via warnings).
std::vector<RunsRow> load_runs(const std::string& runs_csv_path,
                               std::vector<std::string>* warnings = nullptr);

/// Aggregates runs into a per-dataset comparison CSV sorted by accuracy.
void write_comparison(const std::vector<RunsRow>& rows, const std::string& out_path);

}  // namespace featcode
