#pragma once

#include <array>
#include <cstdint>
#include <filesystem>

#include "polarsep/image.hpp"

namespace polarsep::viz {

using Rgb8 = std::array<std::uint8_t, 3>;

/// Standard six-sector HSV to RGB with saturation 1, quantized by
/// lround(255 * c). `hue_deg` in [0, 360), `value` clamped to [0, 1].
Rgb8 hue_value_to_rgb8(double hue_deg, double value);

/// Nearest-rank percentile of the finite samples; 1.0 when there are none
/// or the percentile is not positive.
double auto_scale(const DoubleImage& intensity, double percentile = 0.99);

/// Hue = 360 * phase / pi, brightness = clamp(intensity / scale, 0, 1).
/// Non-finite samples map to black. A scale <= 0 selects auto_scale.
/// Throws DimensionMismatch on differing shapes or multi-channel input.
Image<std::uint8_t> phase_colormap(const DoubleImage& intensity, const DoubleImage& phase, double scale = 0.0);

/// Binary PPM (P6), top row first.
void write_ppm(const Image<std::uint8_t>& rgb, const std::filesystem::path& path);

}  // namespace polarsep::viz
