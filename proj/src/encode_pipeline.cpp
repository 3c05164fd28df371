#include "featcode/encode_pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "featcode/aztec.hpp"
#include "featcode/errors.hpp"
#include "featcode/parallel.hpp"
#include "featcode/qr.hpp"
#include "featcode/raster.hpp"

namespace featcode {

Payload row_payload(const FeatureTable& scaled, std::size_t row,
                    const std::vector<std::size_t>& indices, int precision) {
    std::vector<double> values;
    values.reserve(indices.size());
    for (const std::size_t j : indices) {
        values.push_back(std::clamp(scaled.at(row, j), 0.0, 1.0));
    }
    Payload payload = serialize_payload(values, precision);
    payload.feature_indices = indices;
    return payload;
}

namespace {

struct SampleSymbol {
    ModuleMatrix matrix;
    RasterImage image;
};

SampleSymbol encode_one(const FeatureTable& scaled, std::size_t row,
                        const std::vector<std::size_t>& indices, const EncodeOptions& options) {
    const Payload payload = row_payload(scaled, row, indices, options.precision);
    SampleSymbol out;
    if (options.symbology == Symbology::qr) {
        QrProfile profile;
        profile.version = options.qr_version;
        out.matrix = qr_encode(payload.bytes, profile);
        out.image = render_image(out.matrix, options.box_size, options.border);
    } else {
        out.matrix = aztec_encode(payload.bytes, options.aztec_layers);
        out.image = render_image(out.matrix, options.module_size, 0);
    }
    if (options.resize_to > 0) out.image = resize_image(out.image, options.resize_to);
    return out;
}

}  // namespace

EncodedBatch encode_table(const FeatureTable& scaled, const std::vector<std::size_t>& indices,
                          const EncodeOptions& options) {
    EncodedBatch result;
    result.symbology = options.symbology;
    const std::size_t n = scaled.rows();
    result.images.labels = scaled.labels;
    result.images.class_names = scaled.class_names;
    if (n == 0) {
        result.images.dim = options.resize_to;
        return result;
    }

    // first sample pins the geometry; payload length is constant, so every
    // row produces the same symbol size
    const SampleSymbol first = encode_one(scaled, 0, indices, options);
    result.symbol_size = first.matrix.size;
    result.version_or_layers =
        options.symbology == Symbology::qr ? first.matrix.version : first.matrix.layers;
    result.rendered_size =
        options.resize_to > 0
            ? (options.symbology == Symbology::qr
                   ? (first.matrix.size + 2 * options.border) * options.box_size
                   : first.matrix.size * options.module_size)
            : first.image.width;

    const int dim = first.image.width;
    result.images.dim = dim;
    result.images.images =
        Tensor<float>({n, static_cast<std::size_t>(dim), static_cast<std::size_t>(dim), 1});

    const std::size_t pixels = static_cast<std::size_t>(dim) * dim;
    auto store = [&](std::size_t row, const RasterImage& img) {
        float* dst = result.images.images.data.data() + row * pixels;
        for (std::size_t p = 0; p < pixels; ++p) dst[p] = static_cast<float>(img.pixels[p]) / 255.0f;
    };
    store(0, first.image);

    parallel_chunks(n - 1, options.threads, [&](int, std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const std::size_t row = i + 1;
            const SampleSymbol symbol = encode_one(scaled, row, indices, options);
            if (symbol.image.width != dim)
                throw ShapeError("inconsistent symbol geometry within one run");
            store(row, symbol.image);
        }
    });
    return result;
}

std::string encode_table_to_dir(const FeatureTable& scaled,
                                const std::vector<std::size_t>& indices,
                                const EncodeOptions& options, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create '" + out_dir + "'");
    for (const std::string& cls : scaled.class_names) {
        fs::create_directories(fs::path(out_dir) / cls, ec);
        if (ec) throw IoError("cannot create class directory under '" + out_dir + "'");
    }

    const std::size_t n = scaled.rows();
    std::vector<std::string> lines(n);
    parallel_chunks(n, options.threads, [&](int, std::size_t lo, std::size_t hi) {
        for (std::size_t row = lo; row < hi; ++row) {
            const SampleSymbol symbol = encode_one(scaled, row, indices, options);
            const std::string& cls =
                scaled.class_names[static_cast<std::size_t>(scaled.labels[row])];
            const std::string rel =
                cls + "/sample_" + std::to_string(row) + ".pgm";
            save_pgm(symbol.image, (fs::path(out_dir) / rel).string());
            nlohmann::json record;
            record["sample_id"] = row;
            record["class"] = cls;
            record["symbology"] = options.symbology == Symbology::qr ? "qr" : "aztec";
            record["version_or_layers"] =
                options.symbology == Symbology::qr ? symbol.matrix.version : symbol.matrix.layers;
            record["symbol_size"] = symbol.matrix.size;
            record["image_path"] = rel;
            lines[row] = record.dump();
        }
    });

    const std::string manifest_path = (fs::path(out_dir) / "manifest.jsonl").string();
    std::ofstream manifest(manifest_path);
    if (!manifest) throw IoError("cannot write '" + manifest_path + "'");
    for (const std::string& line : lines) manifest << line << '\n';
    return manifest_path;
}

ImageBatch load_image_dir(const std::string& manifest_path,
                          const std::vector<std::string>& class_names, int resize_to) {
    namespace fs = std::filesystem;
    std::ifstream in(manifest_path);
    if (!in) throw IoError("cannot open '" + manifest_path + "' for reading");
    const fs::path base = fs::path(manifest_path).parent_path();

    struct Record {
        std::string path;
        int label;
    };
    std::vector<Record> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const nlohmann::json record = nlohmann::json::parse(line);
        const std::string cls = record.at("class").get<std::string>();
        const auto it = std::find(class_names.begin(), class_names.end(), cls);
        if (it == class_names.end()) throw SchemaError("manifest class '" + cls + "' is unknown");
        records.push_back({(base / record.at("image_path").get<std::string>()).string(),
                           static_cast<int>(it - class_names.begin())});
    }

    ImageBatch batch;
    batch.class_names = class_names;
    batch.labels.resize(records.size());
    if (records.empty()) {
        batch.dim = resize_to;
        return batch;
    }
    RasterImage probe = load_pgm(records.front().path);
    if (resize_to > 0) probe = resize_image(probe, resize_to);
    const int dim = probe.width;
    batch.dim = dim;
    const std::size_t pixels = static_cast<std::size_t>(dim) * dim;
    batch.images = Tensor<float>({records.size(), static_cast<std::size_t>(dim),
                                  static_cast<std::size_t>(dim), 1});

    parallel_chunks(records.size(), 0, [&](int, std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            RasterImage img = load_pgm(records[i].path);
            if (resize_to > 0) img = resize_image(img, resize_to);
            if (img.width != dim) throw ShapeError("mixed image sizes under one manifest");
            float* dst = batch.images.data.data() + i * pixels;
            for (std::size_t p = 0; p < pixels; ++p)
                dst[p] = static_cast<float>(img.pixels[p]) / 255.0f;
            batch.labels[i] = records[i].label;
        }
    });
    return batch;
}

}  // namespace featcode
