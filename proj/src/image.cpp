#include "polarsep/image.hpp"

#include "polarsep/errors.hpp"

namespace polarsep {

DoubleImage to_double_image(const FloatImage& image) {
    DoubleImage out(image.width, image.height, image.channels);
    for (std::size_t i = 0; i < image.size(); ++i) out.data[i] = static_cast<double>(image.data[i]);
    return out;
}

FloatImage to_float_image(const DoubleImage& plane) {
    FloatImage out(plane.width, plane.height, plane.channels);
    for (std::size_t i = 0; i < plane.size(); ++i) out.data[i] = static_cast<float>(plane.data[i]);
    return out;
}

void ImageStack::check_consistent() const {
    if (frames.size() != pairs.size()) {
        throw DimensionMismatch("stack has " + std::to_string(frames.size()) + " frames but " +
                                std::to_string(pairs.size()) + " polarizer pairs");
    }
    for (const auto& f : frames) {
        if (!f.same_shape(frames.front())) {
            throw DimensionMismatch("stack frames differ in dimensions");
        }
    }
}

}  // namespace polarsep
