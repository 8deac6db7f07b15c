#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "polarsep/image.hpp"

namespace polarsep::structured_light {

/// Reflected binary code. Throws std::out_of_range unless 0 <= n < 2^n_bits.
std::uint32_t gray_encode(std::int64_t n, int n_bits = 31);
std::uint32_t gray_decode(std::int64_t g, int n_bits = 31);

/// Smallest bit count whose code range covers `width` columns.
int bits_for_width(int width);

/// One bit-plane of the column code together with its complement.
struct BitPlanePatterns {
    int bit = 0;
    DoubleImage pattern;  ///< 1 where bit `bit` of gray_encode(column) is set
    DoubleImage inverse;
};

/// Column-only Gray-code projector patterns, most significant bit first.
struct GrayCodeSet {
    int n_bits = 0;
    int width = 0;
    int height = 0;
    std::vector<BitPlanePatterns> planes;
};

/// Throws std::invalid_argument when 2^n_bits < projector_width.
GrayCodeSet generate_patterns(int n_bits, int projector_width, int projector_height = 1);

/// Camera images observed under one bit-plane and its inverse.
struct BitObservation {
    int bit = 0;
    DoubleImage pattern;
    DoubleImage inverse;
};

/// Decoded projector column per camera pixel (-1 when invalid).
struct CorrespondenceMap {
    int width = 0;
    int height = 0;
    int n_bits = 0;
    std::vector<int> column;
    std::vector<double> confidence;  ///< min over bits of |pattern - inverse|

    bool valid(int x, int y) const { return column[static_cast<std::size_t>(y * width + x)] >= 0; }
    int at(int x, int y) const { return column[static_cast<std::size_t>(y * width + x)]; }
    std::size_t valid_count() const;
};

/// Bit is set where the pattern image is brighter than its inverse; a pixel
/// is invalid when any bit differs by less than `threshold`. Single-channel
/// observations only. Throws DimensionMismatch on mismatched pairs.
CorrespondenceMap decode(std::span<const BitObservation> observations, double threshold);

/// 2% of the brightest sample over all observation images.
double default_threshold(std::span<const BitObservation> observations, double fraction = 0.02);

}  // namespace polarsep::structured_light
