#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "udnsim/engine.hpp"

namespace udnsim {

struct ColorRgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const ColorRgb&, const ColorRgb&) = default;
};

/// Blue (0) to red (1) linear ramp; channels rounded half away from zero.
/// Throws std::invalid_argument outside [0, 1].
ColorRgb colorize(double v);

/// Blue (negative) through white (zero) to red (positive); v is divided
/// by `scale` and clamped to [-1, 1].
ColorRgb colorize_diverging(double v, double scale = 1.0);

struct DiffMap {
    std::string fingerprint_a;
    std::string fingerprint_b;
    int resolution = 0;
    double side_km = 0;
    std::vector<double> values;  ///< a - b, row-major like CoverageMap

    double max_abs() const;
};

/// Per-pixel a - b. Throws std::invalid_argument on resolution/region mismatch.
DiffMap diff(const CoverageMap& a, const CoverageMap& b);

/// "x_km,y_km,coverage" rows in row-major pixel order (y outer, x inner),
/// coverage with 6 decimals.
std::string write_csv(const CoverageMap& map);

/// Inverse of write_csv (values to 1e-6). Throws std::invalid_argument on
/// malformed input.
CoverageMap parse_csv(std::string_view text);

/// 8-bit RGB PNG, resolution x resolution; image row 0 is the top
/// (largest y) of the region.
std::string write_png(const CoverageMap& map);

/// Diverging-colormap PNG of a difference map.
std::string write_diff_png(const DiffMap& diff, double scale = 1.0);

/// Encodes row-major top-to-bottom RGB pixels as PNG.
std::string encode_png_rgb(int width, int height, const std::vector<ColorRgb>& pixels);

} // namespace udnsim
