#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "featcode/module_matrix.hpp"

namespace featcode {

/// 8-bit grayscale image; 0 = dark module, 255 = light.
struct RasterImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // row-major

    std::uint8_t at(int row, int col) const {
        return pixels[static_cast<std::size_t>(row) * width + col];
    }
};

/// Each module becomes a box_size x box_size block, surrounded by `border`
/// rings of light modules.
RasterImage render_image(const ModuleMatrix& matrix, int box_size, int border);

/// Square resize: area-averaging box filter when shrinking, bilinear when
/// growing, bit-identical copy when target equals the current size.
RasterImage resize_image(const RasterImage& image, int target);

/// Binary PGM (P5, maxval 255).
void save_pgm(const RasterImage& image, const std::string& path);
RasterImage load_pgm(const std::string& path);

}  // namespace featcode
