#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "featcode/feature_table.hpp"
#include "featcode/module_matrix.hpp"
#include "featcode/nn.hpp"
#include "featcode/preprocess.hpp"

namespace featcode {

struct EncodeOptions {
    Symbology symbology = Symbology::qr;
    int qr_version = 0;    // 0 = smallest fitting (constant per run: payload length is fixed)
    int aztec_layers = 0;  // 0 = smallest fitting
    int box_size = 5;      // QR pixels per module
    int border = 1;        // QR quiet-zone modules
    int module_size = 5;   // Aztec pixels per module (no border)
    int precision = 4;
    int resize_to = 0;  // 0 = keep the rendered size
    int threads = 0;
};

/// Selected feature values of one row, clamped to [0,1], as payload bytes.
Payload row_payload(const FeatureTable& scaled, std::size_t row,
                    const std::vector<std::size_t>& indices, int precision);

/// Encodes every row into a symbol image, in memory. All images in a run
/// share one size; symbol geometry is recorded in the returned metadata.
struct EncodedBatch {
    ImageBatch images;
    Symbology symbology;
    int symbol_size = 0;        // modules per side
    int version_or_layers = 0;  // QR version / Aztec layers
    int rendered_size = 0;      // pixels before any resize
};

EncodedBatch encode_table(const FeatureTable& scaled, const std::vector<std::size_t>& indices,
                          const EncodeOptions& options);

/// Disk variant: one PGM per sample under class-named subdirectories plus a
/// JSON-lines manifest {sample_id, class, symbology, version_or_layers,
/// image_path}. Returns the manifest path.
std::string encode_table_to_dir(const FeatureTable& scaled,
                                const std::vector<std::size_t>& indices,
                                const EncodeOptions& options, const std::string& out_dir);

/// Loads a manifest written by encode_table_to_dir back into memory,
/// resizing every image to resize_to (0 keeps stored size).
ImageBatch load_image_dir(const std::string& manifest_path,
                          const std::vector<std::string>& class_names, int resize_to);

}  // namespace featcode
