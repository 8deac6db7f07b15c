#pragma once

#include <span>

#include "polarsep/image.hpp"

namespace polarsep::imaging {

struct ExposedFrame {
    FloatImage image;
    double exposure_s = 1.0;
};

/// Hat weight min(z, saturation - z), never negative.
double hat_weight(double z, double saturation_level);

/// Weighted radiance merge of an exposure bracket:
///   L = sum w(z) z / t / sum w(z)
/// over samples below `saturation_level`. When every unsaturated sample has
/// zero weight the plain mean of z / t is used; a pixel saturated in every
/// frame becomes NaN. Frames are accumulated in order of exposure, so the
/// result does not depend on input order.
FloatImage merge_hdr(std::span<const ExposedFrame> frames, double saturation_level);

}  // namespace polarsep::imaging
