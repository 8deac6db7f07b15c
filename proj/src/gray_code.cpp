#include "polarsep/gray_code.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include "polarsep/errors.hpp"

namespace polarsep::structured_light {

namespace {

void check_range(std::int64_t v, int n_bits, const char* what) {
    if (n_bits < 1 || n_bits > 31) throw std::out_of_range("n_bits must lie in [1, 31]");
    if (v < 0 || v >= (std::int64_t{1} << n_bits)) {
        throw std::out_of_range(std::string(what) + " " + std::to_string(v) + " outside [0, 2^" +
                                std::to_string(n_bits) + ")");
    }
}

}  // namespace

std::uint32_t gray_encode(std::int64_t n, int n_bits) {
    check_range(n, n_bits, "value");
    const auto u = static_cast<std::uint32_t>(n);
    return u ^ (u >> 1);
}

std::uint32_t gray_decode(std::int64_t g, int n_bits) {
    check_range(g, n_bits, "code");
    auto v = static_cast<std::uint32_t>(g);
    for (std::uint32_t shift = 1; shift < 32; shift <<= 1) v ^= v >> shift;
    return v;
}

int bits_for_width(int width) {
    if (width < 1) throw std::invalid_argument("projector width must be positive");
    int bits = 1;
    while ((std::int64_t{1} << bits) < width) ++bits;
    return bits;
}

GrayCodeSet generate_patterns(int n_bits, int projector_width, int projector_height) {
    if (projector_width < 1 || projector_height < 1) throw std::invalid_argument("projector size must be positive");
    if (n_bits < 1 || n_bits > 31 || (std::int64_t{1} << n_bits) < projector_width) {
        throw std::invalid_argument("insufficient bits for projector width " + std::to_string(projector_width));
    }
    GrayCodeSet set{n_bits, projector_width, projector_height, {}};
    for (int bit = n_bits - 1; bit >= 0; --bit) {
        BitPlanePatterns bp{bit, DoubleImage(projector_width, projector_height),
                            DoubleImage(projector_width, projector_height)};
        for (int c = 0; c < projector_width; ++c) {
            const double on = (gray_encode(c, n_bits) >> bit) & 1u ? 1.0 : 0.0;
            for (int r = 0; r < projector_height; ++r) {
                bp.pattern.at(c, r) = on;
                bp.inverse.at(c, r) = 1.0 - on;
            }
        }
        set.planes.push_back(std::move(bp));
    }
    return set;
}

std::size_t CorrespondenceMap::valid_count() const {
    return static_cast<std::size_t>(std::count_if(column.begin(), column.end(), [](int c) { return c >= 0; }));
}

CorrespondenceMap decode(std::span<const BitObservation> observations, double threshold) {
    if (observations.empty()) throw std::invalid_argument("decode: no observations");
    const auto& shape = observations.front().pattern;
    std::set<int> bits;
    for (const auto& o : observations) {
        if (!o.pattern.same_shape(shape) || !o.inverse.same_shape(shape)) {
            throw DimensionMismatch("decode: pattern/inverse images differ in dimensions");
        }
        if (o.bit < 0 || o.bit > 30 || !bits.insert(o.bit).second) {
            throw std::invalid_argument("decode: bit indices must be distinct and in [0, 30]");
        }
    }
    if (shape.channels != 1) throw DimensionMismatch("decode: expected single-channel images");
    const int n_bits = *bits.rbegin() + 1;

    CorrespondenceMap map;
    map.width = shape.width;
    map.height = shape.height;
    map.n_bits = n_bits;
    map.column.assign(shape.pixel_count(), -1);
    map.confidence.assign(shape.pixel_count(), 0.0);

    for (std::size_t i = 0; i < shape.pixel_count(); ++i) {
        std::uint32_t code = 0;
        double conf = std::numeric_limits<double>::infinity();
        for (const auto& o : observations) {
            const double diff = o.pattern.data[i] - o.inverse.data[i];
            conf = std::min(conf, std::abs(diff));
            if (diff > 0.0) code |= 1u << o.bit;
        }
        if (!std::isfinite(conf)) conf = 0.0;
        map.confidence[i] = conf;
        if (conf >= threshold && conf > 0.0) map.column[i] = static_cast<int>(gray_decode(code, n_bits));
    }
    return map;
}

double default_threshold(std::span<const BitObservation> observations, double fraction) {
    double peak = 0.0;
    for (const auto& o : observations) {
        for (double v : o.pattern.data) {
            if (std::isfinite(v)) peak = std::max(peak, v);
        }
        for (double v : o.inverse.data) {
            if (std::isfinite(v)) peak = std::max(peak, v);
        }
    }
    return fraction * peak;
}

}  // namespace polarsep::structured_light
