#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "featcode/feature_table.hpp"

namespace featcode {

/// The 55 memory-dump feature columns expected in a CIC-MalMem-2022 export,
/// in canonical order.
const std::vector<std::string>& cic_feature_names();

/// Fixed class order for CIC tables: benign, then malware alphabetically.
const std::vector<std::string>& cic_class_names();

/// Fixed class order for BODMAS tables: benign, then the three kept families.
const std::vector<std::string>& bodmas_class_names();

/// Loads a CIC-MalMem-2022 feature CSV (55 named feature columns plus a
/// final `label` column with class text). Columns may appear in any order;
/// the result uses canonical column order. Rows keep file order.
FeatureTable load_cic_csv(const std::string& path);

/// Loads a BODMAS export: a features file (CSV of floats, or the FTBL raw
/// matrix format) plus a metadata CSV with columns row_index,label. Rows
/// labeled with families other than the kept ones are dropped.
FeatureTable load_bodmas(const std::string& features_path, const std::string& meta_path,
                         std::size_t expected_dim = 2384);

/// Generic loader for the toolkit CSV format: header row, feature columns,
/// final `label` column. When class_names is given, label text must match
/// one of them; otherwise classes are taken in order of first appearance.
FeatureTable load_csv(const std::string& path,
                      std::optional<std::vector<std::string>> class_names = std::nullopt);

/// Writes the toolkit CSV format. Values round-trip bit-exactly.
void save_csv(const FeatureTable& table, const std::string& path);

/// Raw little-endian matrix export: 16-byte header (magic "FTBL", u32 rows,
/// u32 cols) followed by rows*cols float32 values, plus a metadata CSV
/// (row_index,label) and a JSON manifest with column and class names.
void save_ftbl(const FeatureTable& table, const std::string& stem);
FeatureTable load_ftbl(const std::string& stem);

/// Uniform per-class subsample without replacement; output rows shuffled.
/// Throws CapacityError when a requested count exceeds availability.
FeatureTable subsample_per_class(const FeatureTable& table,
                                 const std::map<int, std::size_t>& n_per_class,
                                 std::uint64_t seed);

/// Per-class stratified partition. Validation/test sizes are floor(n_c * r);
/// remainder rows go to train. Throws Error when a class has fewer rows than
/// there are nonzero parts.
SplitIndices stratified_split(const FeatureTable& table, double train_ratio,
                              double validation_ratio, double test_ratio, std::uint64_t seed);

/// Same partition over a bare label vector (image batches).
SplitIndices stratified_split_labels(const std::vector<int>& labels, std::size_t n_classes,
                                     double train_ratio, double validation_ratio,
                                     double test_ratio, std::uint64_t seed);

/// Deterministic Gaussian blob table; labels balanced, rows shuffled.
FeatureTable synth_generate(const SynthProfile& profile);

}  // namespace featcode
