#include "featcode/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "featcode/errors.hpp"
#include "featcode/rng.hpp"

namespace featcode {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (const char c : line) {
        if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    fields.push_back(field);
    return fields;
}

double parse_cell(const std::string& text, std::size_t row, const std::string& column) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        throw SchemaError("unparseable numeric cell in row " + std::to_string(row) + ", column '" +
                          column + "': '" + text + "'");
    }
    if (!std::isfinite(value)) {
        throw SchemaError("non-finite value in row " + std::to_string(row) + ", column '" +
                          column + "'");
    }
    return value;
}

std::string format_double(double value) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

int label_index(const std::string& text, const std::vector<std::string>& class_names,
                std::size_t row) {
    const std::string t = lower(text);
    for (std::size_t i = 0; i < class_names.size(); ++i) {
        if (t == class_names[i]) return static_cast<int>(i);
    }
    throw SchemaError("unknown label '" + text + "' in row " + std::to_string(row));
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    return out;
}

void put_u32le(std::ofstream& out, std::uint32_t v) {
    const char bytes[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                           static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
    out.write(bytes, 4);
}

std::uint32_t get_u32le(std::ifstream& in, const std::string& path) {
    unsigned char bytes[4];
    if (!in.read(reinterpret_cast<char*>(bytes), 4)) throw IoError("truncated header in '" + path + "'");
    return static_cast<std::uint32_t>(bytes[0]) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
           (static_cast<std::uint32_t>(bytes[2]) << 16) | (static_cast<std::uint32_t>(bytes[3]) << 24);
}

}  // namespace

const std::vector<std::string>& cic_feature_names() {
    static const std::vector<std::string> names = {
        "pslist.nproc", "pslist.nppid", "pslist.avg_threads", "pslist.nprocs64bit",
        "pslist.avg_handlers", "dlllist.ndlls", "dlllist.avg_dlls_per_proc", "handles.nhandles",
        "handles.avg_handles_per_proc", "handles.nport", "handles.nfile", "handles.nevent",
        "handles.ndesktop", "handles.nkey", "handles.nthread", "handles.ndirectory",
        "handles.nsemaphore", "handles.ntimer", "handles.nsection", "handles.nmutant",
        "ldrmodules.not_in_load", "ldrmodules.not_in_init", "ldrmodules.not_in_mem",
        "ldrmodules.not_in_load_avg", "ldrmodules.not_in_init_avg", "ldrmodules.not_in_mem_avg",
        "malfind.ninjections", "malfind.commitCharge", "malfind.protection",
        "malfind.uniqueInjections", "psxview.not_in_pslist", "psxview.not_in_eprocess_pool",
        "psxview.not_in_ethread_pool", "psxview.not_in_pspcid_list",
        "psxview.not_in_csrss_handles", "psxview.not_in_session", "psxview.not_in_deskthrd",
        "psxview.not_in_pslist_false_avg", "psxview.not_in_eprocess_pool_false_avg",
        "psxview.not_in_ethread_pool_false_avg", "psxview.not_in_pspcid_list_false_avg",
        "psxview.not_in_csrss_handles_false_avg", "psxview.not_in_session_false_avg",
        "psxview.not_in_deskthrd_false_avg", "modules.nmodules", "svcscan.nservices",
        "svcscan.kernel_drivers", "svcscan.fs_drivers", "svcscan.process_services",
        "svcscan.shared_process_services", "svcscan.interactive_process_services",
        "svcscan.nactive", "callbacks.ncallbacks", "callbacks.nanonymous", "callbacks.ngeneric"};
    return names;
}

const std::vector<std::string>& cic_class_names() {
    static const std::vector<std::string> names = {"benign", "ransomware", "spyware", "trojan"};
    return names;
}

const std::vector<std::string>& bodmas_class_names() {
    static const std::vector<std::string> names = {"benign", "sfone", "wacatac", "upatre"};
    return names;
}

FeatureTable load_cic_csv(const std::string& path) {
    std::ifstream in = open_input(path);
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("'" + path + "' is empty, expected a header row");
    const std::vector<std::string> header = split_csv_line(line);

    const std::vector<std::string>& expected = cic_feature_names();
    // Map each expected column to its position in the file. Two layouts are
    // accepted: the toolkit CSV (55 features + label) and the published
    // dataset (Category + 55 features + Class), where the malware family is
    // the prefix of the Category text.
    std::vector<std::size_t> column_pos(expected.size());
    std::size_t label_pos = header.size();
    bool category_label = false;
    for (std::size_t i = 0; i < expected.size(); ++i) {
        const auto it = std::find(header.begin(), header.end(), expected[i]);
        if (it == header.end()) throw SchemaError("missing feature column '" + expected[i] + "'");
        column_pos[i] = static_cast<std::size_t>(it - header.begin());
    }
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string name = lower(header[i]);
        if (name == "label") {
            label_pos = i;
        } else if (name == "category") {
            label_pos = i;
            category_label = true;
        } else if (name == "class") {
            // published binary label, subsumed by the Category text
        } else if (std::find(expected.begin(), expected.end(), header[i]) == expected.end()) {
            throw SchemaError("unexpected extra column '" + header[i] + "'");
        }
    }
    if (label_pos == header.size()) throw SchemaError("missing 'label' column");

    FeatureTable table;
    table.column_names = expected;
    table.class_names = cic_class_names();

    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw SchemaError("row " + std::to_string(row) + " has " +
                              std::to_string(fields.size()) + " fields, expected " +
                              std::to_string(header.size()));
        }
        for (std::size_t j = 0; j < expected.size(); ++j) {
            table.values.push_back(parse_cell(fields[column_pos[j]], row, expected[j]));
        }
        std::string label_text = fields[label_pos];
        if (category_label) {
            const std::size_t dash = label_text.find('-');
            if (dash != std::string::npos) label_text.resize(dash);
        }
        table.labels.push_back(label_index(label_text, table.class_names, row));
        ++row;
    }
    return table;
}

namespace {

// Reads a features file that is either an FTBL raw matrix or a plain CSV of
// floats (no header detection: a first line that parses fully as numbers is
// data, otherwise it is skipped as a header).
std::vector<double> load_feature_rows(const std::string& path, std::size_t expected_dim,
                                      std::size_t& out_rows) {
    std::ifstream probe = open_input(path);
    char magic[4] = {0, 0, 0, 0};
    probe.read(magic, 4);
    std::vector<double> data;
    if (std::memcmp(magic, "FTBL", 4) == 0) {
        const std::uint32_t rows = get_u32le(probe, path);
        const std::uint32_t cols = get_u32le(probe, path);
        get_u32le(probe, path);  // reserved
        if (cols != expected_dim) {
            throw SchemaError("feature row length " + std::to_string(cols) + " != expected " +
                              std::to_string(expected_dim));
        }
        data.resize(static_cast<std::size_t>(rows) * cols);
        std::vector<unsigned char> buf(static_cast<std::size_t>(cols) * 4);
        for (std::uint32_t r = 0; r < rows; ++r) {
            if (!probe.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size())))
                throw IoError("truncated FTBL data in '" + path + "'");
            for (std::uint32_t c = 0; c < cols; ++c) {
                std::uint32_t bits = static_cast<std::uint32_t>(buf[c * 4]) |
                                     (static_cast<std::uint32_t>(buf[c * 4 + 1]) << 8) |
                                     (static_cast<std::uint32_t>(buf[c * 4 + 2]) << 16) |
                                     (static_cast<std::uint32_t>(buf[c * 4 + 3]) << 24);
                float f;
                std::memcpy(&f, &bits, 4);
                data[static_cast<std::size_t>(r) * cols + c] = static_cast<double>(f);
            }
        }
        out_rows = rows;
        return data;
    }

    std::ifstream in = open_input(path);
    std::string line;
    std::size_t row = 0;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (first) {
            first = false;
            double ignored;
            const auto [p, ec] =
                std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), ignored);
            if (ec != std::errc() || p != fields[0].data() + fields[0].size()) continue;  // header
        }
        if (fields.size() != expected_dim) {
            throw SchemaError("feature row length " + std::to_string(fields.size()) +
                              " != expected " + std::to_string(expected_dim) + " at row " +
                              std::to_string(row));
        }
        for (std::size_t j = 0; j < fields.size(); ++j) {
            data.push_back(parse_cell(fields[j], row, "f" + std::to_string(j)));
        }
        ++row;
    }
    out_rows = row;
    return data;
}

}  // namespace

FeatureTable load_bodmas(const std::string& features_path, const std::string& meta_path,
                         std::size_t expected_dim) {
    std::size_t n_rows = 0;
    const std::vector<double> rows = load_feature_rows(features_path, expected_dim, n_rows);

    std::ifstream meta = open_input(meta_path);
    std::string line;
    if (!std::getline(meta, line)) throw SchemaError("'" + meta_path + "' is empty");
    {
        const std::vector<std::string> header = split_csv_line(line);
        if (header.size() != 2 || lower(header[0]) != "row_index" || lower(header[1]) != "label")
            throw SchemaError("metadata header must be 'row_index,label'");
    }
    std::vector<std::string> families;
    families.reserve(n_rows);
    std::size_t meta_row = 0;
    while (std::getline(meta, line)) {
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != 2) throw SchemaError("bad metadata row " + std::to_string(meta_row));
        std::size_t index = 0;
        const auto [p, ec] =
            std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), index);
        if (ec != std::errc() || p != fields[0].data() + fields[0].size() || index != meta_row)
            throw SchemaError("metadata row_index out of order at row " + std::to_string(meta_row));
        families.push_back(lower(fields[1]));
        ++meta_row;
    }
    if (meta_row != n_rows) {
        throw SchemaError("metadata has " + std::to_string(meta_row) + " rows but features file has " +
                          std::to_string(n_rows));
    }

    FeatureTable table;
    table.class_names = bodmas_class_names();
    table.column_names.reserve(expected_dim);
    for (std::size_t j = 0; j < expected_dim; ++j) table.column_names.push_back("f" + std::to_string(j));

    for (std::size_t r = 0; r < n_rows; ++r) {
        const auto it = std::find(table.class_names.begin(), table.class_names.end(), families[r]);
        if (it == table.class_names.end()) continue;  // family not kept
        table.labels.push_back(static_cast<int>(it - table.class_names.begin()));
        const double* src = rows.data() + r * expected_dim;
        table.values.insert(table.values.end(), src, src + expected_dim);
    }
    return table;
}

FeatureTable load_csv(const std::string& path, std::optional<std::vector<std::string>> class_names) {
    std::ifstream in = open_input(path);
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("'" + path + "' is empty, expected a header row");
    std::vector<std::string> header = split_csv_line(line);
    if (header.empty() || lower(header.back()) != "label")
        throw SchemaError("last column must be 'label'");
    header.pop_back();

    FeatureTable table;
    table.column_names = header;
    const bool fixed_classes = class_names.has_value();
    if (fixed_classes) table.class_names = std::move(*class_names);

    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != header.size() + 1) {
            throw SchemaError("row " + std::to_string(row) + " has " +
                              std::to_string(fields.size()) + " fields, expected " +
                              std::to_string(header.size() + 1));
        }
        for (std::size_t j = 0; j < header.size(); ++j) {
            table.values.push_back(parse_cell(fields[j], row, header[j]));
        }
        const std::string text = lower(fields.back());
        if (fixed_classes) {
            table.labels.push_back(label_index(text, table.class_names, row));
        } else {
            auto it = std::find(table.class_names.begin(), table.class_names.end(), text);
            if (it == table.class_names.end()) {
                table.class_names.push_back(text);
                it = table.class_names.end() - 1;
            }
            table.labels.push_back(static_cast<int>(it - table.class_names.begin()));
        }
        ++row;
    }
    return table;
}

void save_csv(const FeatureTable& table, const std::string& path) {
    std::ofstream out = open_output(path);
    for (std::size_t j = 0; j < table.column_names.size(); ++j) {
        out << table.column_names[j] << ',';
    }
    out << "label\n";
    for (std::size_t r = 0; r < table.rows(); ++r) {
        for (std::size_t j = 0; j < table.cols(); ++j) {
            out << format_double(table.at(r, j)) << ',';
        }
        out << table.class_names[static_cast<std::size_t>(table.labels[r])] << '\n';
    }
    if (!out) throw IoError("write failure on '" + path + "'");
}

void save_ftbl(const FeatureTable& table, const std::string& stem) {
    {
        std::ofstream out = open_output(stem + ".ftbl");
        out.write("FTBL", 4);
        put_u32le(out, static_cast<std::uint32_t>(table.rows()));
        put_u32le(out, static_cast<std::uint32_t>(table.cols()));
        put_u32le(out, 0);  // reserved, keeps the header 16 bytes
        std::vector<char> buf(table.cols() * 4);
        for (std::size_t r = 0; r < table.rows(); ++r) {
            for (std::size_t c = 0; c < table.cols(); ++c) {
                const float f = static_cast<float>(table.at(r, c));
                std::uint32_t bits;
                std::memcpy(&bits, &f, 4);
                buf[c * 4 + 0] = static_cast<char>(bits & 0xFF);
                buf[c * 4 + 1] = static_cast<char>((bits >> 8) & 0xFF);
                buf[c * 4 + 2] = static_cast<char>((bits >> 16) & 0xFF);
                buf[c * 4 + 3] = static_cast<char>((bits >> 24) & 0xFF);
            }
            out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
        }
        if (!out) throw IoError("write failure on '" + stem + ".ftbl'");
    }
    {
        std::ofstream out = open_output(stem + ".meta.csv");
        out << "row_index,label\n";
        for (std::size_t r = 0; r < table.rows(); ++r) {
            out << r << ',' << table.class_names[static_cast<std::size_t>(table.labels[r])] << '\n';
        }
        if (!out) throw IoError("write failure on '" + stem + ".meta.csv'");
    }
    {
        nlohmann::json manifest;
        manifest["column_names"] = table.column_names;
        manifest["class_names"] = table.class_names;
        manifest["rows"] = table.rows();
        std::ofstream out = open_output(stem + ".manifest.json");
        out << manifest.dump(2) << '\n';
        if (!out) throw IoError("write failure on '" + stem + ".manifest.json'");
    }
}

FeatureTable load_ftbl(const std::string& stem) {
    nlohmann::json manifest;
    {
        std::ifstream in = open_input(stem + ".manifest.json");
        in >> manifest;
    }
    FeatureTable table;
    table.column_names = manifest.at("column_names").get<std::vector<std::string>>();
    table.class_names = manifest.at("class_names").get<std::vector<std::string>>();

    const std::string path = stem + ".ftbl";
    std::ifstream in = open_input(path);
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "FTBL", 4) != 0)
        throw SchemaError("'" + path + "' is not an FTBL file");
    const std::uint32_t rows = get_u32le(in, path);
    const std::uint32_t cols = get_u32le(in, path);
    get_u32le(in, path);  // reserved
    if (cols != table.column_names.size())
        throw SchemaError("FTBL column count disagrees with manifest for '" + stem + "'");

    table.values.resize(static_cast<std::size_t>(rows) * cols);
    std::vector<unsigned char> buf(static_cast<std::size_t>(cols) * 4);
    for (std::uint32_t r = 0; r < rows; ++r) {
        if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size())))
            throw IoError("truncated FTBL data in '" + path + "'");
        for (std::uint32_t c = 0; c < cols; ++c) {
            std::uint32_t bits = static_cast<std::uint32_t>(buf[c * 4]) |
                                 (static_cast<std::uint32_t>(buf[c * 4 + 1]) << 8) |
                                 (static_cast<std::uint32_t>(buf[c * 4 + 2]) << 16) |
                                 (static_cast<std::uint32_t>(buf[c * 4 + 3]) << 24);
            float f;
            std::memcpy(&f, &bits, 4);
            table.values[static_cast<std::size_t>(r) * cols + c] = static_cast<double>(f);
        }
    }

    std::ifstream meta = open_input(stem + ".meta.csv");
    std::string line;
    std::getline(meta, line);  // header
    table.labels.reserve(rows);
    std::size_t row = 0;
    while (std::getline(meta, line)) {
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != 2) throw SchemaError("bad metadata row " + std::to_string(row));
        table.labels.push_back(label_index(fields[1], table.class_names, row));
        ++row;
    }
    if (row != rows) throw SchemaError("metadata row count disagrees with FTBL for '" + stem + "'");
    return table;
}

FeatureTable subsample_per_class(const FeatureTable& table,
                                 const std::map<int, std::size_t>& n_per_class,
                                 std::uint64_t seed) {
    const std::vector<std::size_t> available = table.class_counts();
    std::vector<std::vector<std::size_t>> by_class(table.class_names.size());
    for (std::size_t r = 0; r < table.rows(); ++r) {
        by_class[static_cast<std::size_t>(table.labels[r])].push_back(r);
    }

    Rng rng(seed);
    std::vector<std::size_t> chosen;
    for (const auto& [cls, count] : n_per_class) {
        if (cls < 0 || static_cast<std::size_t>(cls) >= table.class_names.size())
            throw ValueError("unknown class index " + std::to_string(cls));
        const auto& pool = by_class[static_cast<std::size_t>(cls)];
        if (count > pool.size()) {
            throw CapacityError("requested " + std::to_string(count) + " rows of class '" +
                                table.class_names[static_cast<std::size_t>(cls)] + "' but only " +
                                std::to_string(pool.size()) + " available");
        }
        for (const std::size_t k : rng.sample_without_replacement(pool.size(), count)) {
            chosen.push_back(pool[k]);
        }
    }
    rng.shuffle(chosen);
    return table.select_rows(chosen);
}

SplitIndices stratified_split_labels(const std::vector<int>& labels, std::size_t n_classes,
                                     double train_ratio, double validation_ratio,
                                     double test_ratio, std::uint64_t seed) {
    if (train_ratio < 0 || validation_ratio < 0 || test_ratio < 0)
        throw ValueError("split ratios must be non-negative");
    if (std::abs(train_ratio + validation_ratio + test_ratio - 1.0) > 1e-9)
        throw ValueError("split ratios must sum to 1");

    int nonzero_parts = 0;
    for (const double r : {train_ratio, validation_ratio, test_ratio}) {
        if (r > 0) ++nonzero_parts;
    }

    std::vector<std::vector<std::size_t>> by_class(n_classes);
    for (std::size_t r = 0; r < labels.size(); ++r) {
        by_class[static_cast<std::size_t>(labels[r])].push_back(r);
    }

    SplitIndices split;
    split.seed = seed;
    Rng rng(seed);
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        auto& rows = by_class[c];
        if (rows.empty()) continue;
        if (rows.size() < static_cast<std::size_t>(nonzero_parts)) {
            throw Error("class " + std::to_string(c) + " has " + std::to_string(rows.size()) +
                        " rows, fewer than the " + std::to_string(nonzero_parts) + " split parts");
        }
        rng.shuffle(rows);
        const std::size_t n = rows.size();
        const auto n_val = static_cast<std::size_t>(std::floor(static_cast<double>(n) * validation_ratio));
        const auto n_test = static_cast<std::size_t>(std::floor(static_cast<double>(n) * test_ratio));
        // remainder rows stay in train
        std::size_t i = 0;
        for (; i < n - n_val - n_test; ++i) split.train.push_back(rows[i]);
        for (; i < n - n_test; ++i) split.validation.push_back(rows[i]);
        for (; i < n; ++i) split.test.push_back(rows[i]);
    }
    return split;
}

SplitIndices stratified_split(const FeatureTable& table, double train_ratio,
                              double validation_ratio, double test_ratio, std::uint64_t seed) {
    return stratified_split_labels(table.labels, table.class_names.size(), train_ratio,
                                   validation_ratio, test_ratio, seed);
}

FeatureTable synth_generate(const SynthProfile& profile) {
    if (profile.n_classes < 2) throw ValueError("synth profile needs at least 2 classes");
    if (profile.n_features < 1) throw ValueError("synth profile needs at least 1 feature");
    if (profile.class_separation < 0) throw ValueError("class separation must be >= 0");
    if (profile.n_per_class < 1) throw ValueError("need at least 1 sample per class");

    FeatureTable table;
    for (int j = 0; j < profile.n_features; ++j) table.column_names.push_back("f" + std::to_string(j));
    for (int c = 0; c < profile.n_classes; ++c) table.class_names.push_back("class" + std::to_string(c));

    Rng rng(profile.seed);
    for (int c = 0; c < profile.n_classes; ++c) {
        const double mean = static_cast<double>(c) * profile.class_separation;
        for (int i = 0; i < profile.n_per_class; ++i) {
            table.labels.push_back(c);
            for (int j = 0; j < profile.n_features; ++j) {
                table.values.push_back(mean + rng.next_normal());
            }
        }
    }
    // shuffle rows so splits do not see class-sorted data
    std::vector<std::size_t> order(table.rows());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    return table.select_rows(order);
}

}  // namespace featcode
