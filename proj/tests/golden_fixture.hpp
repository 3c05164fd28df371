#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

// Golden symbol matrices captured from independent reference encoders.
struct GoldenSymbol {
    std::string symbology;
    std::vector<std::uint8_t> payload;
    int version = 0;  // qr
    int mask = -1;    // qr
    bool compact = false;  // aztec
    int layers = 0;        // aztec
    int data_codewords = 0;  // aztec
    int size = 0;
    std::vector<std::string> rows;  // '1' = dark
};

inline GoldenSymbol load_golden(const std::string& path) {
    std::ifstream in(path);
    REQUIRE_MESSAGE(in.good(), "missing fixture ", path);
    GoldenSymbol golden;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream fields(line);
        std::string key;
        fields >> key;
        if (key == "symbology") {
            fields >> golden.symbology;
        } else if (key == "payload_hex") {
            std::string hex;
            fields >> hex;
            for (std::size_t i = 0; i + 2 <= hex.size(); i += 2) {
                golden.payload.push_back(
                    static_cast<std::uint8_t>(std::stoi(hex.substr(i, 2), nullptr, 16)));
            }
        } else if (key == "version") {
            fields >> golden.version;
        } else if (key == "mask") {
            fields >> golden.mask;
        } else if (key == "compact") {
            int flag = 0;
            fields >> flag;
            golden.compact = flag != 0;
        } else if (key == "layers") {
            fields >> golden.layers;
        } else if (key == "data_codewords") {
            fields >> golden.data_codewords;
        } else if (key == "ecl") {
            // always L in this corpus
        } else if (key == "size") {
            fields >> golden.size;
            golden.rows.reserve(static_cast<std::size_t>(golden.size));
            while (static_cast<int>(golden.rows.size()) < golden.size && std::getline(in, line)) {
                if (!line.empty() && line.back() == '\r') line.pop_back();
                golden.rows.push_back(line);
            }
        }
    }
    REQUIRE(static_cast<int>(golden.rows.size()) == golden.size);
    return golden;
}

inline std::string fixture_path(const std::string& rel) {
    return std::string(FEATCODE_FIXTURE_DIR) + "/" + rel;
}
