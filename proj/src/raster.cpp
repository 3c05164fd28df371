#include "featcode/raster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "featcode/errors.hpp"

namespace featcode {

RasterImage render_image(const ModuleMatrix& matrix, int box_size, int border) {
    if (box_size < 1) throw ValueError("box_size must be >= 1");
    if (border < 0) throw ValueError("border must be >= 0");
    const int span = matrix.size + 2 * border;
    RasterImage image;
    image.width = span * box_size;
    image.height = image.width;
    image.pixels.assign(static_cast<std::size_t>(image.width) * image.height, 255);

    for (int row = 0; row < matrix.size; ++row) {
        for (int col = 0; col < matrix.size; ++col) {
            if (!matrix.get(row, col)) continue;
            const int y0 = (row + border) * box_size;
            const int x0 = (col + border) * box_size;
            for (int dy = 0; dy < box_size; ++dy) {
                std::uint8_t* line = image.pixels.data() +
                                     static_cast<std::size_t>(y0 + dy) * image.width + x0;
                std::fill(line, line + box_size, std::uint8_t{0});
            }
        }
    }
    return image;
}

namespace {

RasterImage box_downscale(const RasterImage& src, int target) {
    RasterImage out;
    out.width = target;
    out.height = target;
    out.pixels.resize(static_cast<std::size_t>(target) * target);
    const double sx = static_cast<double>(src.width) / target;
    const double sy = static_cast<double>(src.height) / target;

    for (int oy = 0; oy < target; ++oy) {
        const double y0 = oy * sy;
        const double y1 = (oy + 1) * sy;
        for (int ox = 0; ox < target; ++ox) {
            const double x0 = ox * sx;
            const double x1 = (ox + 1) * sx;
            double sum = 0.0;
            for (int y = static_cast<int>(std::floor(y0)); y < static_cast<int>(std::ceil(y1)); ++y) {
                const double wy = std::min(y1, static_cast<double>(y + 1)) -
                                  std::max(y0, static_cast<double>(y));
                if (wy <= 0.0) continue;
                for (int x = static_cast<int>(std::floor(x0)); x < static_cast<int>(std::ceil(x1)); ++x) {
                    const double wx = std::min(x1, static_cast<double>(x + 1)) -
                                      std::max(x0, static_cast<double>(x));
                    if (wx <= 0.0) continue;
                    sum += wx * wy * src.at(std::min(y, src.height - 1), std::min(x, src.width - 1));
                }
            }
            const double mean = sum / (sx * sy);
            out.pixels[static_cast<std::size_t>(oy) * target + ox] =
                static_cast<std::uint8_t>(std::clamp<long>(std::llround(mean), 0, 255));
        }
    }
    return out;
}

RasterImage bilinear_upscale(const RasterImage& src, int target) {
    RasterImage out;
    out.width = target;
    out.height = target;
    out.pixels.resize(static_cast<std::size_t>(target) * target);
    const double sx = static_cast<double>(src.width) / target;
    const double sy = static_cast<double>(src.height) / target;

    for (int oy = 0; oy < target; ++oy) {
        const double fy = std::clamp((oy + 0.5) * sy - 0.5, 0.0, static_cast<double>(src.height - 1));
        const int y0 = static_cast<int>(std::floor(fy));
        const int y1 = std::min(y0 + 1, src.height - 1);
        const double ty = fy - y0;
        for (int ox = 0; ox < target; ++ox) {
            const double fx = std::clamp((ox + 0.5) * sx - 0.5, 0.0, static_cast<double>(src.width - 1));
            const int x0 = static_cast<int>(std::floor(fx));
            const int x1 = std::min(x0 + 1, src.width - 1);
            const double tx = fx - x0;
            const double top = (1.0 - tx) * src.at(y0, x0) + tx * src.at(y0, x1);
            const double bottom = (1.0 - tx) * src.at(y1, x0) + tx * src.at(y1, x1);
            const double value = (1.0 - ty) * top + ty * bottom;
            out.pixels[static_cast<std::size_t>(oy) * target + ox] =
                static_cast<std::uint8_t>(std::clamp<long>(std::llround(value), 0, 255));
        }
    }
    return out;
}

}  // namespace

RasterImage resize_image(const RasterImage& image, int target) {
    if (target < 8) throw ValueError("resize target must be >= 8");
    if (image.width != image.height) throw ValueError("resize expects a square image");
    if (target == image.width) return image;
    return target < image.width ? box_downscale(image, target) : bilinear_upscale(image, target);
}

void save_pgm(const RasterImage& image, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(image.pixels.data()),
              static_cast<std::streamsize>(image.pixels.size()));
    if (!out) throw IoError("write failure on '" + path + "'");
}

RasterImage load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::string magic;
    in >> magic;
    if (magic != "P5") throw SchemaError("'" + path + "' is not a binary PGM");
    int width = 0, height = 0, maxval = 0;
    in >> width >> height >> maxval;
    if (width <= 0 || height <= 0 || maxval != 255)
        throw SchemaError("unsupported PGM geometry in '" + path + "'");
    in.get();  // single whitespace after maxval

    RasterImage image;
    image.width = width;
    image.height = height;
    image.pixels.resize(static_cast<std::size_t>(width) * height);
    if (!in.read(reinterpret_cast<char*>(image.pixels.data()),
                 static_cast<std::streamsize>(image.pixels.size())))
        throw IoError("truncated PGM data in '" + path + "'");
    return image;
}

}  // namespace featcode
