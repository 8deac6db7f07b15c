#include "polarsep/polarization_mosaic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "polarsep/errors.hpp"

namespace polarsep::imaging {

namespace {

double fold180(double deg) {
    double a = std::fmod(deg, 180.0);
    if (a < 0.0) a += 180.0;
    return a;
}

}  // namespace

void MosaicPattern::validate() const {
    std::array<double, 4> folded{};
    for (int i = 0; i < 4; ++i) {
        const double a = angles_deg[static_cast<std::size_t>(i / 2)][static_cast<std::size_t>(i % 2)];
        if (!std::isfinite(a)) throw std::invalid_argument("mosaic angle must be finite");
        folded[static_cast<std::size_t>(i)] = fold180(a);
    }
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (folded[i] == folded[j]) throw std::invalid_argument("mosaic angles must be distinct mod 180");
        }
    }
}

std::vector<PolarizationChannel> demosaic_polarization(const FloatImage& raw, const MosaicPattern& pattern) {
    pattern.validate();
    if (raw.width % 2 != 0 || raw.height % 2 != 0 || raw.width == 0 || raw.height == 0) {
        throw DimensionMismatch("demosaic: raw dimensions must be even and nonzero");
    }
    const int w = raw.width / 2, h = raw.height / 2, ch = raw.channels;

    std::vector<PolarizationChannel> out;
    for (int dy = 0; dy < 2; ++dy) {
        for (int dx = 0; dx < 2; ++dx) {
            PolarizationChannel pc;
            pc.angle_deg = pattern.angles_deg[static_cast<std::size_t>(dy)][static_cast<std::size_t>(dx)];
            pc.image = FloatImage(w, h, ch);
            for (int y = 0; y < h; ++y) {
                for (int x = 0; x < w; ++x) {
                    for (int c = 0; c < ch; ++c) pc.image.at(x, y, c) = raw.at(2 * x + dx, 2 * y + dy, c);
                }
            }
            out.push_back(std::move(pc));
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const PolarizationChannel& a, const PolarizationChannel& b) {
        return fold180(a.angle_deg) < fold180(b.angle_deg);
    });
    return out;
}

FloatImage interleave_polarization(const std::vector<PolarizationChannel>& channels, const MosaicPattern& pattern) {
    pattern.validate();
    if (channels.size() != 4) throw std::invalid_argument("interleave: expected four channels");
    const auto& shape = channels.front().image;
    for (const auto& c : channels) {
        if (!c.image.same_shape(shape)) throw DimensionMismatch("interleave: channel dimensions differ");
    }

    FloatImage raw(shape.width * 2, shape.height * 2, shape.channels);
    for (int dy = 0; dy < 2; ++dy) {
        for (int dx = 0; dx < 2; ++dx) {
            const double want = fold180(pattern.angles_deg[static_cast<std::size_t>(dy)][static_cast<std::size_t>(dx)]);
            const auto it = std::find_if(channels.begin(), channels.end(),
                                         [&](const PolarizationChannel& c) { return fold180(c.angle_deg) == want; });
            if (it == channels.end()) throw std::invalid_argument("interleave: no channel for a mosaic angle");
            for (int y = 0; y < shape.height; ++y) {
                for (int x = 0; x < shape.width; ++x) {
                    for (int c = 0; c < shape.channels; ++c) raw.at(2 * x + dx, 2 * y + dy, c) = it->image.at(x, y, c);
                }
            }
        }
    }
    return raw;
}

}  // namespace polarsep::imaging
