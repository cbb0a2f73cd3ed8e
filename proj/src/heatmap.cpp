#include "udnsim/heatmap.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace udnsim {

namespace {

std::uint8_t channel(double x)
{
    return static_cast<std::uint8_t>(std::lround(255.0 * x));
}

void put_u32(std::string& out, std::uint32_t v)
{
    out.push_back(static_cast<char>((v >> 24) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>(v & 0xff));
}

void put_chunk(std::string& out, const char type[4], const std::string& data)
{
    put_u32(out, static_cast<std::uint32_t>(data.size()));
    std::string body(type, 4);
    body += data;
    out += body;
    const auto crc = crc32(0L, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size()));
    put_u32(out, static_cast<std::uint32_t>(crc));
}

} // namespace

ColorRgb colorize(double v)
{
    if (!(v >= 0.0 && v <= 1.0)) {
        throw std::invalid_argument("coverage value outside [0, 1]");
    }
    return {channel(v), 0, channel(1.0 - v)};
}

ColorRgb colorize_diverging(double v, double scale)
{
    double x = scale > 0.0 ? v / scale : 0.0;
    if (std::isnan(x)) {
        x = 0.0;
    }
    x = std::clamp(x, -1.0, 1.0);
    if (x >= 0.0) {
        const auto fade = channel(1.0 - x);
        return {255, fade, fade};
    }
    const auto fade = channel(1.0 + x);
    return {fade, fade, 255};
}

double DiffMap::max_abs() const
{
    double m = 0.0;
    for (double v : values) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

DiffMap diff(const CoverageMap& a, const CoverageMap& b)
{
    if (a.resolution != b.resolution || a.side_km != b.side_km || a.coverage.size() != b.coverage.size()) {
        throw std::invalid_argument("maps differ in resolution or region");
    }
    DiffMap d;
    d.fingerprint_a = a.fingerprint;
    d.fingerprint_b = b.fingerprint;
    d.resolution = a.resolution;
    d.side_km = a.side_km;
    d.values.resize(a.coverage.size());
    for (std::size_t p = 0; p < a.coverage.size(); ++p) {
        d.values[p] = a.coverage[p] - b.coverage[p];
    }
    return d;
}

std::string write_csv(const CoverageMap& map)
{
    std::string out = "x_km,y_km,coverage\n";
    char line[96];
    for (int j = 0; j < map.resolution; ++j) {
        for (int i = 0; i < map.resolution; ++i) {
            const Point2D c = pixel_center(i, j, map.resolution, map.side_km);
            std::snprintf(line, sizeof line, "%.10g,%.10g,%.6f\n", c.x_km, c.y_km, map.at(i, j));
            out += line;
        }
    }
    return out;
}

CoverageMap parse_csv(std::string_view text)
{
    auto eol = text.find('\n');
    if (eol == std::string_view::npos || text.substr(0, eol) != "x_km,y_km,coverage") {
        throw std::invalid_argument("missing CSV header");
    }
    std::vector<double> xs;
    std::vector<double> values;
    std::size_t pos = eol + 1;
    while (pos < text.size()) {
        eol = text.find('\n', pos);
        if (eol == std::string_view::npos) {
            eol = text.size();
        }
        const std::string line{text.substr(pos, eol - pos)};
        pos = eol + 1;
        if (line.empty()) {
            continue;
        }
        double x = 0;
        double y = 0;
        double v = 0;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &x, &y, &v) != 3) {
            throw std::invalid_argument("malformed CSV row: " + line);
        }
        xs.push_back(x);
        values.push_back(v);
    }
    const auto res = static_cast<int>(std::lround(std::sqrt(static_cast<double>(values.size()))));
    if (res < 1 || static_cast<std::size_t>(res) * res != values.size()) {
        throw std::invalid_argument("CSV row count is not a square");
    }
    CoverageMap map;
    map.resolution = res;
    map.side_km = 2.0 * xs.front() * res;
    map.coverage = std::move(values);
    map.trials.assign(map.coverage.size(), 0);
    return map;
}

std::string encode_png_rgb(int width, int height, const std::vector<ColorRgb>& pixels)
{
    std::string raw;
    raw.reserve(static_cast<std::size_t>(height) * (1 + 3 * static_cast<std::size_t>(width)));
    for (int row = 0; row < height; ++row) {
        raw.push_back(0);  // filter: none
        for (int col = 0; col < width; ++col) {
            const auto& c = pixels[static_cast<std::size_t>(row) * width + col];
            raw.push_back(static_cast<char>(c.r));
            raw.push_back(static_cast<char>(c.g));
            raw.push_back(static_cast<char>(c.b));
        }
    }
    uLongf packed_size = compressBound(static_cast<uLong>(raw.size()));
    std::string packed(packed_size, '\0');
    if (compress2(reinterpret_cast<Bytef*>(packed.data()), &packed_size, reinterpret_cast<const Bytef*>(raw.data()),
                  static_cast<uLong>(raw.size()), 9) != Z_OK) {
        throw std::runtime_error("zlib compression failed");
    }
    packed.resize(packed_size);

    std::string png = "\x89PNG\r\n\x1a\n";
    std::string header;
    put_u32(header, static_cast<std::uint32_t>(width));
    put_u32(header, static_cast<std::uint32_t>(height));
    header += std::string{"\x08\x02\x00\x00\x00", 5};  // 8-bit RGB, no interlace
    put_chunk(png, "IHDR", header);
    put_chunk(png, "IDAT", packed);
    put_chunk(png, "IEND", {});
    return png;
}

std::string write_png(const CoverageMap& map)
{
    const int res = map.resolution;
    std::vector<ColorRgb> pixels(static_cast<std::size_t>(res) * res);
    for (int row = 0; row < res; ++row) {
        const int j = res - 1 - row;
        for (int i = 0; i < res; ++i) {
            pixels[static_cast<std::size_t>(row) * res + i] = colorize(map.at(i, j));
        }
    }
    return encode_png_rgb(res, res, pixels);
}

std::string write_diff_png(const DiffMap& d, double scale)
{
    const int res = d.resolution;
    std::vector<ColorRgb> pixels(static_cast<std::size_t>(res) * res);
    for (int row = 0; row < res; ++row) {
        const int j = res - 1 - row;
        for (int i = 0; i < res; ++i) {
            pixels[static_cast<std::size_t>(row) * res + i] =
                colorize_diverging(d.values[static_cast<std::size_t>(j) * res + i], scale);
        }
    }
    return encode_png_rgb(res, res, pixels);
}

} // namespace udnsim
