#include "polarsep/hdr_merge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "polarsep/errors.hpp"

namespace polarsep::imaging {

double hat_weight(double z, double saturation_level) {
    return std::max(0.0, std::min(z, saturation_level - z));
}

FloatImage merge_hdr(std::span<const ExposedFrame> frames, double saturation_level) {
    if (frames.empty()) throw std::invalid_argument("merge_hdr: no frames");
    if (!(saturation_level > 0.0)) throw std::invalid_argument("merge_hdr: saturation level must be positive");
    for (const auto& f : frames) {
        if (!(f.exposure_s > 0.0) || !std::isfinite(f.exposure_s)) {
            throw std::invalid_argument("merge_hdr: exposure must be positive");
        }
        if (!f.image.same_shape(frames.front().image)) throw DimensionMismatch("merge_hdr: frame dimensions differ");
    }

    std::vector<std::size_t> order(frames.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return frames[a].exposure_s < frames[b].exposure_s; });
    for (std::size_t i = 1; i < order.size(); ++i) {
        if (frames[order[i]].exposure_s == frames[order[i - 1]].exposure_s) {
            throw std::invalid_argument("merge_hdr: exposures must be distinct");
        }
    }

    const auto& shape = frames.front().image;
    FloatImage out(shape.width, shape.height, shape.channels);
    for (std::size_t i = 0; i < out.size(); ++i) {
        double wsum = 0.0, acc = 0.0, plain = 0.0;
        int unsaturated = 0;
        for (std::size_t k : order) {
            const double z = frames[k].image.data[i];
            if (!std::isfinite(z) || z >= saturation_level) continue;
            const double t = frames[k].exposure_s;
            const double w = hat_weight(z, saturation_level);
            wsum += w;
            acc += w * z / t;
            plain += z / t;
            ++unsaturated;
        }
        double radiance = std::numeric_limits<double>::quiet_NaN();
        if (unsaturated == 1) {
            radiance = plain;
        } else if (wsum > 0.0) {
            radiance = acc / wsum;
        } else if (unsaturated > 0) {
            radiance = plain / unsaturated;
        }
        out.data[i] = static_cast<float>(radiance);
    }
    return out;
}

}  // namespace polarsep::imaging
