#pragma once

#include <array>
#include <vector>

#include "polarsep/image.hpp"

namespace polarsep::imaging {

/// Micro-polarizer angles (degrees) of one 2x2 superpixel, indexed [row][col].
struct MosaicPattern {
    std::array<std::array<double, 2>, 2> angles_deg{{{90.0, 45.0}, {135.0, 0.0}}};

    /// Throws std::invalid_argument unless the four angles differ mod 180.
    void validate() const;
};

struct PolarizationChannel {
    double angle_deg = 0.0;
    FloatImage image;
};

/// Splits every 2x2 superpixel into four half-resolution images, one per
/// micro-polarizer angle, sorted by angle. No interpolation.
std::vector<PolarizationChannel> demosaic_polarization(const FloatImage& raw, const MosaicPattern& pattern = {});

/// Inverse of demosaic_polarization.
FloatImage interleave_polarization(const std::vector<PolarizationChannel>& channels,
                                   const MosaicPattern& pattern = {});

}  // namespace polarsep::imaging
